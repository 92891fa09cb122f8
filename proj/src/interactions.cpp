#include "ksl/interactions.hpp"

#include "ksl/error.hpp"
#include "ksl/reduce.hpp"
#include "ksl/simd/kernels.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ksl {

namespace {

using DynVec = Eigen::VectorXd;
using DynMat = Eigen::MatrixXd;

// Collision invariants 1, xi_1..xi_n, |xi|^2 at one velocity node.
void invariants(const double* xi, int n, double* phi) {
    phi[0] = 1.0;
    double s = 0;
    for (int a = 0; a < n; ++a) {
        phi[1 + a] = xi[a];
        s += xi[a] * xi[a];
    }
    phi[n + 1] = s;
}

// Envelope W = exp(beta . phi) fitted to log f by weighted least squares. Any Maxwellian is
// reproduced to rounding, and since beta . phi is a collision invariant,
// W(xi') W(xi*') = W(xi) W(xi*) holds exactly for every collision.
struct Envelope {
    std::vector<double> w;      // per velocity node, may underflow to 0
    std::vector<double> log_w;  // log W, exact where w underflows; empty for the W = 1 fallback

    // f / W computed in log space. Where f and W both underflow only the envelope is known, so 1.
    double ratio(double f, std::size_t j) const {
        if (log_w.empty()) return f;
        if (f > 0) return std::exp(std::log(f) - log_w[j]);
        return w[j] > 0 ? 0.0 : 1.0;
    }
};

Envelope fit_envelope(const double* f, const PhaseGrid& g) {
    const int n = g.n, k = n + 2;
    const std::size_t nv = g.nxi_total;
    Envelope env;
    env.w.assign(nv, 1.0);
    double fmax = 0;
    for (std::size_t j = 0; j < nv; ++j) fmax = std::max(fmax, f[j]);
    if (!(fmax > 0)) return env;
    DynMat A = DynMat::Zero(k, k);
    DynVec b = DynVec::Zero(k);
    double phi[5];
    std::size_t used = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        if (!(f[j] > 0)) continue;
        ++used;
        invariants(g.xi_at(j), n, phi);
        // Mass weighting with a floor: a peak narrower than h leaves the system well posed.
        const double om = g.xi_weights()[j] * std::max(f[j] / fmax, 1e-4);
        const double lf = std::log(f[j] / fmax);
        for (int r = 0; r < k; ++r) {
            b(r) += om * phi[r] * lf;
            for (int c = 0; c < k; ++c) A(r, c) += om * phi[r] * phi[c];
        }
    }
    if (used < std::size_t(k + 1)) return env;
    const DynVec beta = A.ldlt().solve(b);
    if (!beta.allFinite() || !(beta(k - 1) < 0)) return env;
    std::vector<double> lw(nv);
    double hi = -1e300;
    for (std::size_t j = 0; j < nv; ++j) {
        invariants(g.xi_at(j), n, phi);
        double s = 0;
        for (int r = 0; r < k; ++r) s += beta(r) * phi[r];
        lw[j] = s;
        hi = std::max(hi, s);
    }
    if (hi > 600) return env;
    env.log_w.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        env.log_w[j] = std::log(fmax) + lw[j];
        env.w[j] = std::exp(env.log_w[j]);
    }
    return env;
}

double gl_weight(int p, double x) {
    const double d = boost::math::legendre_p_prime(p, x);
    return 2.0 / ((1 - x * x) * d * d);
}

// Trilinear ratio lookup for n = 3; face values beyond the velocity box.
double lookup3(const PhaseGrid& g, const std::vector<double>& r, const double* p) {
    int c[3];
    double s[3];
    const double top = g.nxi - 1;
    for (int a = 0; a < 3; ++a) {
        const double u = std::fmin(std::fmax((p[a] - g.xi_lo[a]) / g.hxi[a], 0.0), top);
        const double iu = std::fmin(std::floor(u), top - 1.0);
        c[a] = static_cast<int>(iu);
        s[a] = u - iu;
    }
    const std::size_t m = g.nxi;
    double acc = 0;
    for (int corner = 0; corner < 8; ++corner) {
        double w = 1;
        std::size_t idx = 0;
        for (int a = 0; a < 3; ++a) {
            const int hi = (corner >> (2 - a)) & 1;
            w *= hi ? s[a] : 1.0 - s[a];
            idx = idx * m + c[a] + hi;
        }
        acc += w * r[idx];
    }
    return acc;
}

void gain_loss_slice(const PhaseGrid& g, const SphereRule& rule, const double* f, const double* gv,
                     bool same, double* gain, double* loss) {
    const std::size_t nv = g.nxi_total;
    double fmax = 0;
    for (std::size_t j = 0; j < nv; ++j) fmax = std::max({fmax, f[j], gv[j]});
    if (!(fmax > 0)) {
        std::fill(gain, gain + nv, 0.0);
        std::fill(loss, loss + nv, 0.0);
        return;
    }
    std::vector<double> mean;
    const double* fit_src = f;
    if (!same) {
        mean.resize(nv);
        for (std::size_t j = 0; j < nv; ++j) mean[j] = 0.5 * (f[j] + gv[j]);
        fit_src = mean.data();
    }
    const Envelope env = fit_envelope(fit_src, g);
    std::vector<double> rf(nv), rg, pair_w(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        rf[j] = env.ratio(f[j], j);
        pair_w[j] = g.xi_weights()[j] * env.w[j];
    }
    if (!same) {
        rg.resize(nv);
        for (std::size_t j = 0; j < nv; ++j) rg[j] = env.ratio(gv[j], j);
    }
    const double* rgp = same ? rf.data() : rg.data();

    if (g.n == 2) {
        std::vector<double> cs(rule.count()), sn(rule.count());
        for (std::size_t k = 0; k < rule.count(); ++k) {
            cs[k] = rule.dirs[2 * k];
            sn[k] = rule.dirs[2 * k + 1];
        }
        simd::CollisionRowArgs args{g.nxi, g.xi_lo[0], g.xi_lo[1], 1.0 / g.hxi[0], 1.0 / g.hxi[1],
                                    g.xi_axis(0), g.xi_axis(1), rf.data(), rgp, pair_w.data(),
                                    cs.data(), sn.data(), static_cast<int>(rule.count()), 0};
        const auto& kern = simd::active();
        const double aw = rule.weights[0];
        for (std::size_t i = 0; i < nv; ++i) {
            args.i = i;
            const simd::GainLoss gl = kern.collision_row(args);
            gain[i] = env.w[i] * aw * gl.gain;
            loss[i] = env.w[i] * aw * gl.loss;
        }
        return;
    }

    // n = 3: direct loops over directions with per-direction weights.
    const std::vector<double>& rgv = same ? rf : rg;
    for (std::size_t i = 0; i < nv; ++i) {
        const double* xi = g.xi_at(i);
        double gsum = 0, lsum = 0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double* xs = g.xi_at(j);
            const double u[3] = {xi[0] - xs[0], xi[1] - xs[1], xi[2] - xs[2]};
            double gs = 0, ls = 0;
            for (std::size_t k = 0; k < rule.count(); ++k) {
                const double* e = &rule.dirs[3 * k];
                const double p = e[0] * u[0] + e[1] * u[1] + e[2] * u[2];
                const double a[3] = {xi[0] - p * e[0], xi[1] - p * e[1], xi[2] - p * e[2]};
                const double b[3] = {xs[0] + p * e[0], xs[1] + p * e[1], xs[2] + p * e[2]};
                double prod;
                if (same) {
                    prod = lookup3(g, rf, a) * lookup3(g, rf, b);
                } else {
                    prod = 0.5 * (lookup3(g, rf, a) * lookup3(g, rgv, b) +
                                  lookup3(g, rgv, a) * lookup3(g, rf, b));
                }
                gs += rule.weights[k] * std::fabs(p) * prod;
                ls += rule.weights[k] * std::fabs(p);
            }
            const double lp = same ? rf[i] * rf[j] : 0.5 * (rf[i] * rgv[j] + rgv[i] * rf[j]);
            gsum += pair_w[j] * gs;
            lsum += pair_w[j] * ls * lp;
        }
        gain[i] = env.w[i] * gsum;
        loss[i] = env.w[i] * lsum;
    }
}

DistributionField physical(const DistributionField& f) { return to_physical(f); }

}  // namespace

void KernelSpec::validate() const {
    switch (variant) {
        case Variant::zero: return;
        case Variant::bgk:
            if (!(rate > 0) || !std::isfinite(rate)) fail(ErrorKind::argument, "bgk rate must be finite and > 0");
            return;
        case Variant::hard_sphere:
            if (angular_nodes < 4 || angular_nodes % 2 != 0)
                fail(ErrorKind::argument, "hard_sphere angular_nodes must be even and >= 4");
            return;
    }
}

const char* KernelSpec::name() const {
    switch (variant) {
        case Variant::zero: return "zero";
        case Variant::bgk: return "bgk";
        case Variant::hard_sphere: return "hard_sphere";
    }
    return "unknown";
}

CollisionPair post_collision(int n, const double* xi, const double* xi_star, const double* n_hat) {
    double norm2 = 0, p = 0;
    for (int a = 0; a < n; ++a) {
        norm2 += n_hat[a] * n_hat[a];
        p += n_hat[a] * (xi[a] - xi_star[a]);
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) fail(ErrorKind::argument, "n_hat must be a unit vector");
    CollisionPair out;
    for (int a = 0; a < n; ++a) {
        out.xi_prime[a] = xi[a] - p * n_hat[a];
        out.xi_star_prime[a] = xi_star[a] + p * n_hat[a];
    }
    return out;
}

SphereRule sphere_rule(int n, int angular_nodes) {
    if (angular_nodes < 4 || angular_nodes % 2 != 0)
        fail(ErrorKind::argument, "angular_nodes must be even and >= 4");
    SphereRule rule;
    rule.n = n;
    if (n == 2) {
        const int half = angular_nodes / 2;
        rule.folded = true;
        for (int k = 0; k < half; ++k) {
            const double th = 2.0 * std::numbers::pi * k / angular_nodes;
            rule.dirs.push_back(std::cos(th));
            rule.dirs.push_back(std::sin(th));
            rule.weights.push_back(2.0 * (2.0 * std::numbers::pi / angular_nodes));
        }
        return rule;
    }
    if (n == 3) {
        const int polar = angular_nodes / 2;
        const auto pos = boost::math::legendre_p_zeros<double>(polar);
        std::vector<double> mu;
        for (double z : pos) {
            mu.push_back(z);
            if (z != 0.0) mu.push_back(-z);
        }
        std::sort(mu.begin(), mu.end());
        for (double m : mu) {
            const double wpol = gl_weight(polar, m);
            const double st = std::sqrt(std::max(0.0, 1 - m * m));
            for (int k = 0; k < angular_nodes; ++k) {
                const double ph = 2.0 * std::numbers::pi * k / angular_nodes;
                rule.dirs.push_back(st * std::cos(ph));
                rule.dirs.push_back(st * std::sin(ph));
                rule.dirs.push_back(m);
                rule.weights.push_back(wpol * 2.0 * std::numbers::pi / angular_nodes);
            }
        }
        return rule;
    }
    fail(ErrorKind::unsupported, "hard_sphere collisions need n = 2 or n = 3");
}

GainLossArrays hard_sphere_gain_loss(const DistributionField& f_in, const DistributionField& g_in,
                                     int angular_nodes) {
    if (!f_in.grid().same_as(g_in.grid())) fail(ErrorKind::argument, "gain/loss inputs on different grids");
    const PhaseGrid& g = f_in.grid();
    if (g.n == 1) fail(ErrorKind::unsupported, "hard_sphere interaction is not defined for n = 1");
    const SphereRule rule = sphere_rule(g.n, angular_nodes);
    const DistributionField f = physical(f_in);
    const bool same = &f_in == &g_in;
    const DistributionField gg = same ? f : physical(g_in);
    GainLossArrays out;
    out.gain.assign(g.size, 0.0);
    out.loss.assign(g.size, 0.0);
    const std::size_t nv = g.nxi_total;
    const long nxt = static_cast<long>(g.nx_total);
#pragma omp parallel for schedule(static)
    for (long ix = 0; ix < nxt; ++ix) {
        const std::size_t off = std::size_t(ix) * nv;
        gain_loss_slice(g, rule, f.values().data() + off, gg.values().data() + off, same,
                        out.gain.data() + off, out.loss.data() + off);
    }
    return out;
}

std::vector<double> apply_bilinear(const DistributionField& f, const DistributionField& g,
                                   const KernelSpec& spec) {
    spec.validate();
    const PhaseGrid& grid = f.grid();
    if (spec.variant == KernelSpec::Variant::zero) return std::vector<double>(grid.size, 0.0);
    if (spec.variant != KernelSpec::Variant::hard_sphere)
        fail(ErrorKind::argument, "apply_bilinear needs the zero or hard_sphere kernel");
    GainLossArrays gl = hard_sphere_gain_loss(f, g, spec.angular_nodes);
    std::vector<double> q(grid.size);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = gl.gain[i] - gl.loss[i];
    if (spec.conservative_fix) {
        const std::size_t nv = grid.nxi_total;
        std::vector<double> act(grid.size);
        for (std::size_t i = 0; i < act.size(); ++i) act[i] = gl.gain[i] + gl.loss[i];
        for (std::size_t ix = 0; ix < grid.nx_total; ++ix)
            remove_collision_invariant_part(q.data() + ix * nv, grid, act.data() + ix * nv);
    }
    return q;
}

std::vector<double> apply_interaction(const DistributionField& field, const KernelSpec& spec) {
    spec.validate();
    const PhaseGrid& g = field.grid();
    switch (spec.variant) {
        case KernelSpec::Variant::zero: return std::vector<double>(g.size, 0.0);
        case KernelSpec::Variant::hard_sphere: return apply_bilinear(field, field, spec);
        case KernelSpec::Variant::bgk: {
            const DistributionField f = physical(field);
            std::vector<double> out(g.size);
            const std::size_t nv = g.nxi_total;
            const long nxt = static_cast<long>(g.nx_total);
#pragma omp parallel for schedule(static)
            for (long ix = 0; ix < nxt; ++ix) {
                const double* s = f.values().data() + std::size_t(ix) * nv;
                const LocalMaxwellian m = local_maxwellian(s, g);
                for (std::size_t j = 0; j < nv; ++j) out[std::size_t(ix) * nv + j] = spec.rate * (m.samples[j] - s[j]);
            }
            return out;
        }
    }
    return {};
}

double MesoscopicResiduals::max() const {
    double m = std::max(r0, r2);
    for (double v : r1) m = std::max(m, v);
    return m;
}

MesoscopicResiduals mesoscopic_residuals(const double* slice, const PhaseGrid& g) {
    const std::size_t nv = g.nxi_total;
    std::vector<double> wq(nv), e(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        wq[j] = g.xi_weights()[j] * slice[j];
        double s = 0;
        for (int a = 0; a < g.n; ++a) s += g.xi_at(j)[a] * g.xi_at(j)[a];
        e[j] = s;
    }
    MesoscopicResiduals r;
    std::vector<double> ones(nv, 1.0);
    r.r0 = std::abs(dot(wq.data(), ones.data(), nv));
    for (int a = 0; a < g.n; ++a) r.r1[a] = std::abs(dot(wq.data(), g.xi_axis(a), nv));
    r.r2 = std::abs(dot(wq.data(), e.data(), nv));
    return r;
}

void remove_collision_invariant_part(double* slice, const PhaseGrid& g, const double* activity) {
    const int n = g.n, k = n + 2;
    const std::size_t nv = g.nxi_total;
    double total = 0;
    if (activity)
        for (std::size_t j = 0; j < nv; ++j) total += g.xi_weights()[j] * activity[j];
    if (!(total > 0)) activity = nullptr;
    std::vector<double> phis(nv * k);
    for (std::size_t j = 0; j < nv; ++j) invariants(g.xi_at(j), n, &phis[j * k]);
    // A(r, c) = sum w a phi_r phi_c; the correction is a * (phi . c) with A c = moments.
    auto gram = [&](const double* a) {
        DynMat G = DynMat::Zero(k, k);
        for (std::size_t j = 0; j < nv; ++j) {
            const double w = g.xi_weights()[j] * (a ? a[j] : 1.0);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) G(r, c) += w * phis[j * k + r] * phis[j * k + c];
        }
        return G;
    };
    DynMat G = gram(activity);
    auto ldlt = G.ldlt();
    if (activity && (ldlt.info() != Eigen::Success ||
                     !(ldlt.vectorD().minCoeff() > 1e-13 * ldlt.vectorD().maxCoeff()))) {
        activity = nullptr;
        G = gram(nullptr);
        ldlt = G.ldlt();
    }
    // Two passes: the second removes what rounding left behind in the first.
    for (int pass = 0; pass < 2; ++pass) {
        DynVec b = DynVec::Zero(k);
        for (std::size_t j = 0; j < nv; ++j) {
            const double wq = g.xi_weights()[j] * slice[j];
            for (int r = 0; r < k; ++r) b(r) += wq * phis[j * k + r];
        }
        const DynVec c = ldlt.solve(b);
        for (std::size_t j = 0; j < nv; ++j) {
            double s = 0;
            for (int r = 0; r < k; ++r) s += c(r) * phis[j * k + r];
            slice[j] -= activity ? activity[j] * s : s;
        }
    }
}

LocalMaxwellian local_maxwellian(const double* f, const PhaseGrid& g) {
    const int n = g.n, k = n + 2;
    const std::size_t nv = g.nxi_total;
    LocalMaxwellian out;
    out.samples.assign(nv, 0.0);
    std::vector<double> phis(nv * k);
    DynVec target = DynVec::Zero(k), scale = DynVec::Zero(k);
    for (std::size_t j = 0; j < nv; ++j) {
        invariants(g.xi_at(j), n, &phis[j * k]);
        const double w = g.xi_weights()[j];
        for (int r = 0; r < k; ++r) {
            target(r) += w * phis[j * k + r] * f[j];
            scale(r) += w * std::abs(phis[j * k + r]) * f[j];
        }
    }
    const double rho = target(0);
    if (!(rho > 1e-300)) {
        out.matched = true;
        return out;
    }
    // Start from the continuous moment formulas, then Newton on the exponent coefficients.
    Vec u{};
    double u2 = 0;
    for (int a = 0; a < n; ++a) {
        u[a] = target(1 + a) / rho;
        u2 += u[a] * u[a];
    }
    double T = (2.0 / n) * (target(k - 1) / rho - u2);
    double hmin = g.hxi[0];
    for (int a = 1; a < n; ++a) hmin = std::min(hmin, g.hxi[a]);
    T = std::max(T, 0.25 * hmin * hmin);
    DynVec beta(k);
    beta(0) = std::log(rho) - 0.5 * n * std::log(std::numbers::pi * T) - u2 / T;
    for (int a = 0; a < n; ++a) beta(1 + a) = 2.0 * u[a] / T;
    beta(k - 1) = -1.0 / T;

    auto evaluate = [&](const DynVec& b, std::vector<double>& m, DynVec& F, DynMat* J) {
        F = -target;
        if (J) J->setZero(k, k);
        for (std::size_t j = 0; j < nv; ++j) {
            double s = 0;
            for (int r = 0; r < k; ++r) s += b(r) * phis[j * k + r];
            m[j] = std::exp(std::min(s, 700.0));
            const double wm = g.xi_weights()[j] * m[j];
            for (int r = 0; r < k; ++r) {
                F(r) += wm * phis[j * k + r];
                if (J)
                    for (int c = 0; c < k; ++c) (*J)(r, c) += wm * phis[j * k + r] * phis[j * k + c];
            }
        }
    };
    auto err = [&](const DynVec& F) {
        double e = 0;
        for (int r = 0; r < k; ++r) e = std::max(e, std::abs(F(r)) / scale(r));
        return e;
    };
    std::vector<double> m(nv), trial(nv);
    DynVec F, Ft;
    DynMat J;
    evaluate(beta, m, F, &J);
    double e = err(F);
    for (int it = 0; it < 80 && e > 1e-15; ++it) {
        const DynVec step = J.ldlt().solve(-F);
        if (!step.allFinite()) break;
        double lam = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            const DynVec bt = beta + lam * step;
            evaluate(bt, trial, Ft, nullptr);
            const double et = err(Ft);
            if (std::isfinite(et) && et < e) {
                beta = bt;
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!improved) break;
        evaluate(beta, m, F, &J);
        e = err(F);
    }
    out.samples = m;
    if (e > 1e-12) {
        // Moment-exact linear correction M (1 + gamma . phi); rarely needed (near-singular slices).
        evaluate(beta, m, F, &J);
        const DynVec gamma = J.ldlt().solve(-F);
        if (gamma.allFinite()) {
            for (std::size_t j = 0; j < nv; ++j) {
                double s = 0;
                for (int r = 0; r < k; ++r) s += gamma(r) * phis[j * k + r];
                out.samples[j] = m[j] * (1.0 + s);
            }
        }
    }
    DynVec Fe = -target;
    for (std::size_t j = 0; j < nv; ++j)
        for (int r = 0; r < k; ++r) Fe(r) += g.xi_weights()[j] * out.samples[j] * phis[j * k + r];
    out.matched = err(Fe) <= 1e-12;
    const double c = beta(k - 1);
    out.temperature = -1.0 / c;
    for (int a = 0; a < n; ++a) out.velocity[a] = beta(1 + a) * out.temperature / 2.0;
    out.density = rho;
    return out;
}

}  // namespace ksl
