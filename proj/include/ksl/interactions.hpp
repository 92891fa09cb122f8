#pragma once

#include "ksl/phase_space.hpp"

#include <vector>

namespace ksl {

struct KernelSpec {
    enum class Variant { zero, bgk, hard_sphere };
    Variant variant = Variant::zero;
    double rate = 1.0;        // bgk relaxation rate nu
    int angular_nodes = 16;   // hard sphere: nodes on S^1, or azimuthal nodes on S^2
    bool conservative_fix = true;

    static KernelSpec zero() { return {}; }
    static KernelSpec bgk(double nu) { return {Variant::bgk, nu, 16, true}; }
    static KernelSpec hard_sphere(int angular_nodes = 16, bool fix = true) {
        return {Variant::hard_sphere, 1.0, angular_nodes, fix};
    }

    void validate() const;
    const char* name() const;
};

struct CollisionPair {
    Vec xi_prime{}, xi_star_prime{};
};

// xi' = xi - (n.(xi - xi*)) n, xi*' = xi* + (n.(xi - xi*)) n. Throws if |n_hat| differs from 1
// by more than 1e-12.
CollisionPair post_collision(int n, const double* xi, const double* xi_star, const double* n_hat);

// Unit directions and weights for the sphere quadrature. For n = 2 only the half circle is
// returned and each weight already counts the opposite direction.
struct SphereRule {
    int n = 2;
    std::vector<double> dirs;  // count * n
    std::vector<double> weights;
    bool folded = false;
    std::size_t count() const { return weights.size(); }
};
SphereRule sphere_rule(int n, int angular_nodes);

struct GainLossArrays {
    std::vector<double> gain, loss;
};

// Symmetrized hard-sphere gain and loss terms Q+(f, g), Q-(f, g) at every node. Both inputs
// are read as physical samples on the same grid.
GainLossArrays hard_sphere_gain_loss(const DistributionField& f, const DistributionField& g,
                                     int angular_nodes);

// I(f) at every node of the physical samples of `field`.
std::vector<double> apply_interaction(const DistributionField& field, const KernelSpec& spec);

// Bilinear form Q(f, g) for the hard-sphere kernel (with the projection when requested);
// zero for the zero kernel. BGK is not bilinear and is rejected.
std::vector<double> apply_bilinear(const DistributionField& f, const DistributionField& g,
                                   const KernelSpec& spec);

struct MesoscopicResiduals {
    double r0 = 0;
    Vec r1{};
    double r2 = 0;
    double max() const;
};

// |int I dxi|, |int I xi_a dxi|, |int I |xi|^2 dxi| by the velocity trapezoid rule.
MesoscopicResiduals mesoscopic_residuals(const double* slice, const PhaseGrid& grid);

// Subtracts from a velocity slice a correction a(xi) p(xi), p in span{1, xi_1..xi_n, |xi|^2},
// chosen so the trapezoid moments against 1, xi, |xi|^2 vanish. This is the orthogonal
// projection in the inner product sum w u v / a. With activity == nullptr, a = 1, the plain
// L2 projection. Passing a = Q+ + Q- keeps the correction where collisions happen.
void remove_collision_invariant_part(double* slice, const PhaseGrid& grid, const double* activity = nullptr);

struct LocalMaxwellian {
    std::vector<double> samples;  // per velocity node
    double density = 0;           // continuous parameters after matching
    Vec velocity{};
    double temperature = 0;
    bool matched = false;         // discrete moments reproduced to rounding
};

// Discrete Maxwellian exp(a + b.xi + c|xi|^2) whose trapezoid moments against 1, xi, |xi|^2
// equal those of the slice. A slice with no mass yields all zeros.
LocalMaxwellian local_maxwellian(const double* slice, const PhaseGrid& grid);

}  // namespace ksl
