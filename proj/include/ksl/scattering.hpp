#pragma once

#include "ksl/interactions.hpp"
#include "ksl/phase_space.hpp"

#include <string>
#include <vector>

namespace ksl {

// ---- Frame functionals for the Maxwellian family exp(-|x - t xi|^2 - |xi|^2) ----

// Quadrature and search settings. `level` scales every node count; level 2 doubles level 1.
struct OmegaConfig {
    int level = 1;
    double x_max = 6.0;    // search radius in position (the envelope covers |x| beyond it)
    double xi_max = 10.0;  // search radius in velocity
};

// F_z(x, xi) = int_z^inf int e^{-|x + s xi - s xi*|^2 - |xi*|^2} |xi - xi*| dxi* ds. The s-integral
// is done in closed form along each direction n = (xi - xi*)/|xi - xi*|; the rest is a
// direction sum times a radial integral.
double omega_integrand(int n, const double* x, const double* xi, double z, int level);

struct OmegaResult {
    double value = 0;      // max(grid search, envelope)
    double grid_max = 0;
    double envelope = 0;   // pi^{n/2} (sqrt(pi)/2) erfc(-X) at the search boundary X
    double refined = 0;    // grid maximizer re-evaluated at level + 1
    Vec x_arg{}, xi_arg{};
};

// Omega = sup_{x, xi} F_0(x, xi). Throws a convergence error when two refinement levels differ
// by more than 0.1%.
OmegaResult omega(int n, const OmegaConfig& cfg = {});
// Omega_D(z) with D the ball of radius R at the origin.
OmegaResult omega_tail(double R, double z, int n, const OmegaConfig& cfg = {});

// Analytic bound for Omega_D(z), z > 1, D inside B(0, R):
//   pi^{n/2} int_{z/log z - R}^inf e^{-s^2} ds + V / log^n z * int_{-R}^inf e^{-s^2} ds,
// with V the volume of the unit n-ball (ball_volume = true) or the measure of S^{n-1}.
double omega_tail_bound(double R, double z, int n, bool ball_volume = true);

// Closed-form bound sqrt(pi) pi^{n/2} on Omega.
double omega_gaussian_bound(int n);

// Surface measure of S^{n-1}: 2 for n = 1, 2 pi for n = 2, 4 pi for n = 3.
double sphere_measure(int n);

struct RadiusConfig {
    int angular_nodes = 64;  // directions on S^1 (or azimuthal nodes on S^2)
    int gl_nodes = 14;       // Gauss-Legendre nodes per velocity coordinate and part
    double T = 16.0;         // time truncation; doubled up to 4 times if the tail is too large
    double tail_fraction = 0.01;
};

struct RadiusResult {
    double alpha = 0;        // 1 / (2 (sup gain + sup loss))
    double alpha_lower = 0;  // 1 / (4 |S^{n-1}| Omega a) for amplitude a
    double gain_sup = 0, loss_sup = 0;
    double omega = 0;
    double T = 0;
    double tail_ratio = 0;   // largest certified tail relative to the smaller sup
    std::size_t points = 0;
};

// Time integrals of Q+(l, l)/l(x, xi, 0) and Q-(l, l)/l(x, xi, 0) along (x + s xi, xi, s), s in [0, T].
struct GainLossIntegrals {
    double gain = 0, loss = 0, tail_bound = 0;
};
GainLossIntegrals frame_gain_loss(const FrameSpec& frame, const double* x, const double* xi,
                                  const RadiusConfig& cfg, double T);

// Direct quadrature of the isotropic radius for a Maxwellian frame with unit widths. The sup is
// searched on a symmetric grid plus a ray x = X e, xi = -V e with growing V, where it is
// approached. Throws a convergence error if the truncation tail cannot be certified.
RadiusResult isotropic_radius(const FrameSpec& frame, double omega_value, const RadiusConfig& cfg = {});

// ---- Norms, trajectories and the Picard construction ----

struct ScatteringFrame {
    FrameSpec spec;
    double omega = 0;
    double alpha = 0;
    double alpha_lower = 0;
};

ScatteringFrame make_frame(const FrameSpec& spec, const OmegaConfig& ocfg = {}, const RadiusConfig& rcfg = {});

// max over nodes of value / lambda(x, xi, 0), reading the samples as stored.
double observer_norm(const DistributionField& field, const ScatteringFrame& frame);
// Same restricted to |x| <= D on the difference a - b.
double observer_distance(const DistributionField& a, const DistributionField& b, const ScatteringFrame& frame,
                         double D = -1);

// Trajectory with uniform time step. Snapshots are stored pulled back (characteristic).
// `interaction` optionally holds, per snapshot, Q of the generating iterate moved to the same
// coordinates; it feeds the tail proxy of extract_linear_state.
struct SpaceTimeField {
    double dt = 0;
    std::vector<DistributionField> snapshots;
    std::vector<std::vector<double>> interaction;
    double final_time() const { return dt * double(snapshots.size() - 1); }
};

double scattering_norm(const SpaceTimeField& traj, const ScatteringFrame& frame);
double scattering_distance(const SpaceTimeField& a, const SpaceTimeField& b, const ScatteringFrame& frame);

// Exact transport of f0 sampled at t = 0, dt, ..., steps*dt.
SpaceTimeField transport_trajectory(const DistributionField& f0, double dt, int steps);

// Phi(u)(t) pulled back: f0 + int_0^t Q(u(s))(y + s xi, xi) ds by the time trapezoid rule.
// With a frame, the physical field fed to Q is lambda(x, xi, s) h(x - s xi, xi), where
// h = u / lambda(., 0) is interpolated and held constant beyond the box. Without one, u is
// interpolated directly and vanishes beyond the box.
SpaceTimeField solution_map(const DistributionField& f0, const SpaceTimeField& candidate, const KernelSpec& kernel,
                            const ScatteringFrame* frame = nullptr);

struct PicardRecord {
    std::vector<double> distances;  // d_k = ||u_{k+1} - u_k||_S
    std::vector<double> ratios;     // d_{k+1} / d_k
    std::vector<double> norms;      // ||u_k||_S for every iterate produced
    double bound_ratio = 0;         // N / alpha
    int iterations = 0;
    bool converged = false;
    std::string summary() const;
};

struct PicardConfig {
    double N = 0;
    double T = 1.0;
    int steps = 10;
    double tol = 1e-8;
    int max_iterations = 30;
    bool zero_initial_guess = false;  // start from u0 = 0 instead of the transport of f0
    double initial_scale = 1.0;       // u0 = initial_scale times the transport of f0
};

struct PicardResult {
    SpaceTimeField trajectory;
    PicardRecord record;
};

PicardResult picard_build(const DistributionField& f0, const ScatteringFrame& frame, const KernelSpec& kernel,
                          const PicardConfig& cfg);

struct LinearState {
    DistributionField f_inf;  // chi_D times the final pulled-back snapshot, as a field at t = 0
    double tail_proxy = 0;    // sup over |x| <= D of (1/lambda) int_{T/2}^T |I| dt
};

LinearState extract_linear_state(const SpaceTimeField& traj, const ScatteringFrame& frame, double D_radius,
                                 double tol);

// ||chi_D (pullback(u(t)) - f_inf)||_O per snapshot.
std::vector<double> scattering_residual(const SpaceTimeField& traj, const DistributionField& f_inf,
                                        const ScatteringFrame& frame, double D_radius);

}  // namespace ksl
