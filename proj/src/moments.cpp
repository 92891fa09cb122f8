#include "ksl/moments.hpp"

#include "ksl/error.hpp"
#include "ksl/reduce.hpp"
#include "ksl/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ksl {

namespace {

// Sums weight * value * integrand(x, xi) over all nodes with x the physical position, one
// fixed-order partial per x row.
template <class F>
double integrate(const DistributionField& field, F integrand) {
    const PhaseGrid& g = field.grid();
    const int n = g.n;
    const double shift = field.pulled_back() ? field.time() : 0.0;
    const std::size_t nv = g.nxi_total;
    std::vector<double> rows(g.nx_total);
    const long nxt = static_cast<long>(g.nx_total);
#pragma omp parallel for schedule(static)
    for (long ix = 0; ix < nxt; ++ix) {
        const double* y = g.x_at(ix);
        double lane[simd::lanes] = {};
        for (std::size_t j = 0; j < nv; ++j) {
            const double v = field.values()[std::size_t(ix) * nv + j];
            if (v == 0.0) continue;
            const double* xi = g.xi_at(j);
            double x[3];
            for (int a = 0; a < n; ++a) x[a] = y[a] + shift * xi[a];
            lane[j & 3] += g.xi_weights()[j] * v * integrand(x, xi);
        }
        rows[ix] = g.x_weights()[ix] * ((lane[0] + lane[1]) + (lane[2] + lane[3]));
    }
    return pairwise_sum(rows);
}

double norm(const double* v, int n) {
    double s = 0;
    for (int a = 0; a < n; ++a) s += v[a] * v[a];
    return std::sqrt(s);
}

}  // namespace

void ConeSpec::validate() const {
    if (!(c > 0 && c < std::numbers::pi / 2)) fail(ErrorKind::argument, "cone apex angle must lie in (0, pi/2)");
    if (!(v >= 0) || !std::isfinite(v)) fail(ErrorKind::argument, "cone puncture radius must be >= 0");
}

MomentReport compute_moments(const DistributionField& field) {
    const PhaseGrid& g = field.grid();
    const std::size_t nv = g.nxi_total;
    const double t = field.time();
    const double shift = field.pulled_back() ? t : 0.0;
    const double* axes[3] = {g.xi_axis(0), g.xi_axis(1), g.xi_axis(2)};
    const auto& kern = simd::active();

    std::vector<simd::MomentSums> rows(g.nx_total);
    const long nxt = static_cast<long>(g.nx_total);
#pragma omp parallel for schedule(static)
    for (long ix = 0; ix < nxt; ++ix) {
        std::vector<double> wg(nv);
        const double* vals = field.values().data() + std::size_t(ix) * nv;
        for (std::size_t j = 0; j < nv; ++j) wg[j] = g.xi_weights()[j] * vals[j];
        simd::MomentRowArgs args{g.n, g.x_at(ix), shift, t, axes, wg.data(), nv};
        kern.moment_row(args, rows[ix]);
    }
    std::vector<double> col(g.nx_total);
    auto reduce = [&](auto get) {
        for (std::size_t ix = 0; ix < g.nx_total; ++ix) col[ix] = g.x_weights()[ix] * get(rows[ix]);
        return pairwise_sum(col);
    };
    MomentReport r;
    r.time = t;
    r.n = g.n;
    r.M = reduce([](const simd::MomentSums& s) { return s.m; });
    for (int a = 0; a < g.n; ++a) r.V[a] = reduce([a](const simd::MomentSums& s) { return s.v[a]; });
    r.E = reduce([](const simd::MomentSums& s) { return s.e; });
    r.A = reduce([](const simd::MomentSums& s) { return s.a; });
    r.U = reduce([](const simd::MomentSums& s) { return s.u; });
    r.loc_x = reduce([](const simd::MomentSums& s) { return s.loc_x; });
    r.loc_shift = reduce([](const simd::MomentSums& s) { return s.loc_shift; });
    return r;
}

double relative_angular_gap(const MomentReport& r) { return std::max(0.0, r.U - r.A); }

double relative_angular_norm(const std::vector<MomentReport>& reports) {
    if (reports.empty()) fail(ErrorKind::argument, "relative_angular_norm needs a nonempty history");
    double m = 0;
    for (const auto& r : reports) m = std::max(m, relative_angular_gap(r));
    return m;
}

double morawetz(const DistributionField& field, const double* x0) {
    const int n = field.grid().n;
    return integrate(field, [&](const double* x, const double* xi) {
        double d[3], p = 0;
        for (int a = 0; a < n; ++a) {
            d[a] = x[a] - x0[a];
            p += d[a] * xi[a];
        }
        const double r = norm(d, n);
        return r > 0 ? p / r : 0.0;
    });
}

bool cone_contains(const ConeSpec& spec, int n, const double* x, const double* xi) {
    const double speed = norm(xi, n);
    if (speed < spec.v) return true;
    double d[3];
    for (int a = 0; a < n; ++a) d[a] = x[a] - spec.x0[a];
    const double r = norm(d, n);
    if (r == 0.0 || speed == 0.0) return false;
    // theta = atan2(|d x xi|, d.xi); |d x xi| from Lagrange's identity in a stable form.
    double dotp = 0;
    for (int a = 0; a < n; ++a) dotp += d[a] * xi[a];
    double cross2 = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double c = d[a] * xi[b] - d[b] * xi[a];
            cross2 += c * c;
        }
    const double theta = std::atan2(std::sqrt(cross2), dotp);
    return theta < spec.c || theta > std::numbers::pi - spec.c;
}

double mass_in_gamma(const DistributionField& field, const ConeSpec& spec) {
    const int n = field.grid().n;
    return integrate(field, [&](const double* x, const double* xi) {
        return cone_contains(spec, n, x, xi) ? 1.0 : 0.0;
    });
}

double energy_in_ball(const DistributionField& field, const double* center, double R, double v_floor,
                      bool mass) {
    if (!(R > 0)) fail(ErrorKind::argument, "energy_in_ball radius must be > 0");
    const int n = field.grid().n;
    return integrate(field, [&](const double* x, const double* xi) {
        double d2 = 0, v2 = 0;
        for (int a = 0; a < n; ++a) {
            d2 += (x[a] - center[a]) * (x[a] - center[a]);
            v2 += xi[a] * xi[a];
        }
        if (d2 > R * R || std::sqrt(v2) < v_floor) return 0.0;
        return mass ? 1.0 : v2;
    });
}

double leakage(const DistributionField& field) {
    if (!field.pulled_back()) return 0.0;
    const PhaseGrid& g = field.grid();
    const double total = integrate(field, [](const double*, const double*) { return 1.0; });
    if (!(total > 0)) return 0.0;
    const double tol = 1e-9;
    const double out = integrate(field, [&](const double* x, const double*) {
        for (int a = 0; a < g.n; ++a) {
            const double span = g.x_hi[a] - g.x_lo[a];
            if (x[a] < g.x_lo[a] - tol * span || x[a] > g.x_hi[a] + tol * span) return 1.0;
        }
        return 0.0;
    });
    return out / total;
}

DiagnosticRow diagnose(const DistributionField& field, const DiagnosticsSpec& spec, double clipped_mass) {
    DiagnosticRow row;
    row.report = compute_moments(field);
    row.gap = relative_angular_gap(row.report);
    row.morawetz = morawetz(field, spec.observer.data());
    row.mass_gamma = mass_in_gamma(field, spec.cone);
    row.energy_ball = energy_in_ball(field, spec.ball_center.data(), spec.ball_radius, spec.ball_v_floor,
                                     spec.ball_mass);
    row.leakage = leakage(field);
    row.clipped_mass = clipped_mass;
    return row;
}

}  // namespace ksl
