#include "ksl/scattering.hpp"

#include "ksl/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ksl {

namespace {

// 1 / lambda(x_i, xi_j, 0) at every node.
std::vector<double> inverse_frame(const PhaseGrid& g, const ScatteringFrame& frame) {
    std::vector<double> w(g.size);
    for (std::size_t ix = 0; ix < g.nx_total; ++ix)
        for (std::size_t j = 0; j < g.nxi_total; ++j) {
            const double l = frame_eval(frame.spec, g.x_at(ix), g.xi_at(j), 0.0);
            if (!(l > 0)) fail(ErrorKind::argument, "scattering frame is not positive on the grid");
            w[ix * g.nxi_total + j] = 1.0 / l;
        }
    return w;
}

// lambda(x_i, xi_j, t) at every node.
std::vector<double> frame_values(const PhaseGrid& g, const ScatteringFrame& frame, double t) {
    std::vector<double> v(g.size);
    for (std::size_t ix = 0; ix < g.nx_total; ++ix)
        for (std::size_t j = 0; j < g.nxi_total; ++j) v[ix * g.nxi_total + j] = frame_eval(frame.spec, g.x_at(ix), g.xi_at(j), t);
    return v;
}

std::vector<char> ball_mask(const PhaseGrid& g, double D) {
    std::vector<char> m(g.nx_total, 1);
    if (D < 0) return m;
    for (std::size_t ix = 0; ix < g.nx_total; ++ix) {
        double r2 = 0;
        for (int a = 0; a < g.n; ++a) r2 += g.x_at(ix)[a] * g.x_at(ix)[a];
        m[ix] = r2 <= D * D * (1 + 1e-12);
    }
    return m;
}

double weighted_max(const PhaseGrid& g, const std::vector<double>& inv, const std::vector<char>& mask,
                    const std::vector<double>& a, const std::vector<double>* b) {
    double m = 0;
    for (std::size_t ix = 0; ix < g.nx_total; ++ix) {
        if (!mask[ix]) continue;
        for (std::size_t j = 0; j < g.nxi_total; ++j) {
            const std::size_t i = ix * g.nxi_total + j;
            const double v = b ? a[i] - (*b)[i] : a[i];
            m = std::max(m, std::abs(v) * inv[i]);
        }
    }
    return m;
}

const DistributionField& characteristic_view(const DistributionField& f, DistributionField& tmp) {
    if (f.pulled_back() || f.time() == 0.0) return f;
    tmp = pullback(f);
    return tmp;
}

void check_common_grid(const SpaceTimeField& traj) {
    if (traj.snapshots.empty()) fail(ErrorKind::argument, "trajectory has no snapshots");
    for (const auto& s : traj.snapshots)
        if (!s.grid().same_as(traj.snapshots.front().grid())) fail(ErrorKind::argument, "trajectory grids differ");
}

}  // namespace

ScatteringFrame make_frame(const FrameSpec& spec, const OmegaConfig& ocfg, const RadiusConfig& rcfg) {
    ScatteringFrame f;
    f.spec = spec;
    f.omega = omega(spec.n, ocfg).value;
    const RadiusResult r = isotropic_radius(spec, f.omega, rcfg);
    f.alpha = r.alpha;
    f.alpha_lower = r.alpha_lower;
    return f;
}

double observer_norm(const DistributionField& field, const ScatteringFrame& frame) {
    const PhaseGrid& g = field.grid();
    return weighted_max(g, inverse_frame(g, frame), ball_mask(g, -1), field.values(), nullptr);
}

double observer_distance(const DistributionField& a, const DistributionField& b, const ScatteringFrame& frame,
                         double D) {
    if (!a.grid().same_as(b.grid())) fail(ErrorKind::argument, "observer_distance: grids differ");
    const PhaseGrid& g = a.grid();
    return weighted_max(g, inverse_frame(g, frame), ball_mask(g, D), a.values(), &b.values());
}

double scattering_norm(const SpaceTimeField& traj, const ScatteringFrame& frame) {
    check_common_grid(traj);
    const PhaseGrid& g = traj.snapshots.front().grid();
    const auto inv = inverse_frame(g, frame);
    const auto mask = ball_mask(g, -1);
    double m = 0;
    DistributionField tmp;
    for (const auto& s : traj.snapshots)
        m = std::max(m, weighted_max(g, inv, mask, characteristic_view(s, tmp).values(), nullptr));
    return m;
}

double scattering_distance(const SpaceTimeField& a, const SpaceTimeField& b, const ScatteringFrame& frame) {
    check_common_grid(a);
    check_common_grid(b);
    if (a.snapshots.size() != b.snapshots.size() || !a.snapshots.front().grid().same_as(b.snapshots.front().grid()))
        fail(ErrorKind::argument, "scattering_distance: trajectories differ in shape");
    const PhaseGrid& g = a.snapshots.front().grid();
    const auto inv = inverse_frame(g, frame);
    const auto mask = ball_mask(g, -1);
    double m = 0;
    DistributionField ta, tb;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const auto& va = characteristic_view(a.snapshots[k], ta).values();
        const auto& vb = characteristic_view(b.snapshots[k], tb).values();
        m = std::max(m, weighted_max(g, inv, mask, va, &vb));
    }
    return m;
}

SpaceTimeField transport_trajectory(const DistributionField& f0, double dt, int steps) {
    if (f0.time() != 0.0) fail(ErrorKind::argument, "initial data must be stamped t = 0");
    if (!(dt > 0) || steps < 1) fail(ErrorKind::argument, "trajectory needs dt > 0 and steps >= 1");
    const DistributionField g0 = pullback(f0);
    SpaceTimeField traj;
    traj.dt = dt;
    for (int k = 0; k <= steps; ++k)
        traj.snapshots.emplace_back(g0.grid_ptr(), g0.values(), k * dt, Coordinates::characteristic);
    return traj;
}

SpaceTimeField solution_map(const DistributionField& f0, const SpaceTimeField& candidate, const KernelSpec& kernel,
                            const ScatteringFrame* frame) {
    check_common_grid(candidate);
    if (!f0.grid().same_as(candidate.snapshots.front().grid()))
        fail(ErrorKind::argument, "solution_map: initial data and candidate use different grids");
    if (f0.time() != 0.0) fail(ErrorKind::argument, "initial data must be stamped t = 0");
    const PhaseGrid& g = f0.grid();
    const DistributionField g0 = pullback(f0);
    const std::size_t count = candidate.snapshots.size();
    const std::vector<double> inv0 = frame && kernel.variant != KernelSpec::Variant::zero
                                         ? inverse_frame(g, *frame) : std::vector<double>{};
    SpaceTimeField out;
    out.dt = candidate.dt;
    out.interaction.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
        const double t = m * candidate.dt;
        if (kernel.variant == KernelSpec::Variant::zero) {
            out.interaction[m].assign(g.size, 0.0);
            continue;
        }
        DistributionField c = candidate.snapshots[m];
        if (!c.pulled_back()) c = pullback(c);
        if (!inv0.empty()) {
            std::vector<double> h = c.values();
            for (std::size_t i = 0; i < h.size(); ++i) h[i] *= inv0[i];
            h = shift_clamped(g, h, t);
            const std::vector<double> lam = frame_values(g, *frame, t);
            for (std::size_t i = 0; i < h.size(); ++i) h[i] *= lam[i];
            const DistributionField phys(c.grid_ptr(), std::move(h), t);
            std::vector<double> q = apply_interaction(phys, kernel);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] = lam[i] > 0 ? q[i] / lam[i] : 0.0;
            q = shift_along_characteristics(g, q, -t);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] /= inv0[i];
            out.interaction[m] = std::move(q);
            continue;
        }
        const DistributionField phys(c.grid_ptr(), shift_along_characteristics(g, c.values(), t), t);
        const std::vector<double> q = apply_interaction(phys, kernel);
        out.interaction[m] = shift_along_characteristics(g, q, -t);
    }
    std::vector<double> acc = g0.values();
    out.snapshots.emplace_back(g0.grid_ptr(), acc, 0.0, Coordinates::characteristic);
    for (std::size_t k = 1; k < count; ++k) {
        const auto& a = out.interaction[k - 1];
        const auto& b = out.interaction[k];
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += 0.5 * candidate.dt * (a[i] + b[i]);
        out.snapshots.emplace_back(g0.grid_ptr(), acc, k * candidate.dt, Coordinates::characteristic);
    }
    return out;
}

std::string PicardRecord::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << "iterations=" << iterations << " converged=" << (converged ? "yes" : "no") << " N/alpha=" << bound_ratio
       << " distances=[";
    for (std::size_t i = 0; i < distances.size(); ++i) os << (i ? "," : "") << distances[i];
    os << "]";
    return os.str();
}

PicardResult picard_build(const DistributionField& f0, const ScatteringFrame& frame, const KernelSpec& kernel,
                          const PicardConfig& cfg) {
    kernel.validate();
    f0.validate();
    if (!(cfg.N > 0)) fail(ErrorKind::argument, "picard N must be > 0");
    if (!(cfg.tol > 0)) fail(ErrorKind::argument, "picard tol must be > 0");
    if (frame.alpha > 0 && !(cfg.N < frame.alpha))
        fail(ErrorKind::argument, "picard N must be below the isotropic radius");
    const double dt = cfg.T / cfg.steps;
    SpaceTimeField seed = transport_trajectory(f0, dt, cfg.steps);
    const double s0 = scattering_norm(seed, frame);
    if (s0 > 0.5 * cfg.N * (1 + 1e-12))
        fail(ErrorKind::argument, "initial data has scattering norm " + std::to_string(s0) + " above N/2");
    const double scale = cfg.zero_initial_guess ? 0.0 : cfg.initial_scale;
    if (!(std::abs(scale) <= 1.0)) fail(ErrorKind::argument, "picard initial_scale must lie in [-1, 1]");
    if (scale != 1.0)
        for (auto& s : seed.snapshots)
            for (double& v : s.values()) v *= scale;

    PicardResult res;
    PicardRecord& rec = res.record;
    rec.bound_ratio = frame.alpha > 0 ? cfg.N / frame.alpha : 0.0;
    SpaceTimeField u = std::move(seed);
    int over = 0;
    for (int k = 0; k < cfg.max_iterations; ++k) {
        SpaceTimeField next = solution_map(f0, u, kernel, &frame);
        const double d = scattering_distance(next, u, frame);
        const double norm = scattering_norm(next, frame);
        rec.distances.push_back(d);
        rec.norms.push_back(norm);
        rec.iterations = k + 1;
        if (rec.distances.size() >= 2 && rec.distances[rec.distances.size() - 2] > 0) {
            const double r = d / rec.distances[rec.distances.size() - 2];
            rec.ratios.push_back(r);
            over = (frame.alpha > 0 && r > rec.bound_ratio + 0.05) ? over + 1 : 0;
        }
        u = std::move(next);
        if (norm > cfg.N) fail(ErrorKind::runtime, "Picard iterate left S(N): " + rec.summary());
        if (d <= cfg.tol) {
            rec.converged = true;
            break;
        }
        if (over >= 3)
            fail(ErrorKind::convergence, "Picard ratio persistently above N/alpha + 0.05: " + rec.summary());
    }
    if (!rec.converged) fail(ErrorKind::convergence, "Picard iteration did not converge: " + rec.summary());
    res.trajectory = std::move(u);
    return res;
}

LinearState extract_linear_state(const SpaceTimeField& traj, const ScatteringFrame& frame, double D_radius,
                                 double tol) {
    check_common_grid(traj);
    if (!(D_radius > 0)) fail(ErrorKind::argument, "D radius must be > 0");
    const PhaseGrid& g = traj.snapshots.front().grid();
    const auto inv = inverse_frame(g, frame);
    const auto mask = ball_mask(g, D_radius);
    const std::size_t M = traj.snapshots.size() - 1;
    DistributionField tmp;
    LinearState out;
    std::vector<double> tail(g.size, 0.0);
    if (M > 0) {
        const std::size_t m0 = M / 2;
        if (!traj.interaction.empty()) {
            for (std::size_t m = m0; m < M; ++m)
                for (std::size_t i = 0; i < g.size; ++i)
                    tail[i] += 0.5 * traj.dt * (std::abs(traj.interaction[m][i]) + std::abs(traj.interaction[m + 1][i]));
        } else {
            DistributionField ta;
            for (std::size_t m = m0; m < M; ++m) {
                const auto& a = characteristic_view(traj.snapshots[m], tmp).values();
                const auto& b = characteristic_view(traj.snapshots[m + 1], ta).values();
                for (std::size_t i = 0; i < g.size; ++i) tail[i] += std::abs(b[i] - a[i]);
            }
        }
    }
    out.tail_proxy = weighted_max(g, inv, mask, tail, nullptr);
    if (out.tail_proxy > tol)
        fail(ErrorKind::convergence, "interaction tail " + std::to_string(out.tail_proxy) + " above " +
                                         std::to_string(tol) + "; a longer trajectory is required");
    std::vector<double> v = characteristic_view(traj.snapshots.back(), tmp).values();
    for (std::size_t ix = 0; ix < g.nx_total; ++ix)
        if (!mask[ix]) std::fill(v.begin() + ix * g.nxi_total, v.begin() + (ix + 1) * g.nxi_total, 0.0);
    out.f_inf = DistributionField(traj.snapshots.front().grid_ptr(), std::move(v), 0.0, Coordinates::physical);
    return out;
}

std::vector<double> scattering_residual(const SpaceTimeField& traj, const DistributionField& f_inf,
                                        const ScatteringFrame& frame, double D_radius) {
    check_common_grid(traj);
    const PhaseGrid& g = traj.snapshots.front().grid();
    if (!g.same_as(f_inf.grid())) fail(ErrorKind::argument, "scattering_residual: grids differ");
    const auto inv = inverse_frame(g, frame);
    const auto mask = ball_mask(g, D_radius);
    std::vector<double> out;
    DistributionField tmp;
    for (const auto& s : traj.snapshots)
        out.push_back(weighted_max(g, inv, mask, characteristic_view(s, tmp).values(), &f_inf.values()));
    return out;
}

}  // namespace ksl
