#pragma once

// Per-element operations shared by the scalar kernels and the remainder loops of the SIMD
// kernels. The SIMD code repeats these exact operation sequences lane by lane.

#include "ksl/simd/kernels.hpp"

#include <cmath>

namespace ksl::simd::detail {

struct MomentLanes {
    double m[lanes] = {}, v[3][lanes] = {}, e[lanes] = {}, a[lanes] = {}, u[lanes] = {},
           loc_x[lanes] = {}, loc_shift[lanes] = {};
};

inline double fold(const double* l) { return (l[0] + l[1]) + (l[2] + l[3]); }

inline void moment_element(const MomentRowArgs& r, std::size_t j, MomentLanes& acc) {
    const int lane = static_cast<int>(j & 3);
    const double w = r.wg[j];
    double x[3] = {}, z[3] = {}, xi[3] = {};
    for (int d = 0; d < r.n; ++d) {
        xi[d] = r.xi_axis[d][j];
        x[d] = r.y[d] + r.shift * xi[d];
        z[d] = x[d] - r.tau * xi[d];
    }
    double v2 = xi[0] * xi[0], r2 = x[0] * x[0], xd = x[0] * xi[0], z2 = z[0] * z[0];
    for (int d = 1; d < r.n; ++d) {
        v2 = v2 + xi[d] * xi[d];
        r2 = r2 + x[d] * x[d];
        xd = xd + x[d] * xi[d];
        z2 = z2 + z[d] * z[d];
    }
    acc.m[lane] += w;
    for (int d = 0; d < r.n; ++d) acc.v[d][lane] += w * xi[d];
    acc.e[lane] += w * v2;
    acc.a[lane] += w * xd;
    acc.u[lane] += w * (std::sqrt(r2) * std::sqrt(v2));
    acc.loc_x[lane] += w * r2;
    acc.loc_shift[lane] += w * z2;
}

inline void finish_moments(const MomentLanes& acc, int n, MomentSums& out) {
    out.m = fold(acc.m);
    for (int d = 0; d < 3; ++d) out.v[d] = d < n ? fold(acc.v[d]) : 0.0;
    out.e = fold(acc.e);
    out.a = fold(acc.a);
    out.u = fold(acc.u);
    out.loc_x = fold(acc.loc_x);
    out.loc_shift = fold(acc.loc_shift);
}

inline double lookup(const CollisionRowArgs& r, const double* table, double p0, double p1) {
    const double top = r.nxi - 1;
    // Beyond the velocity box the ratio keeps its value on the nearest face.
    const double u = std::fmin(std::fmax((p0 - r.lo0) * r.inv_h0, 0.0), top);
    const double v = std::fmin(std::fmax((p1 - r.lo1) * r.inv_h1, 0.0), top);
    const double iu = std::fmin(std::floor(u), top - 1.0);
    const double iv = std::fmin(std::floor(v), top - 1.0);
    const double su = u - iu, sv = v - iv;
    const int base = static_cast<int>(iu) * r.nxi + static_cast<int>(iv);
    const double r00 = table[base], r01 = table[base + 1];
    const double r10 = table[base + r.nxi], r11 = table[base + r.nxi + 1];
    return (1.0 - su) * ((1.0 - sv) * r00 + sv * r01) + su * ((1.0 - sv) * r10 + sv * r11);
}

struct CollisionLanes {
    double gain[lanes] = {}, loss[lanes] = {};
};

inline void collision_element(const CollisionRowArgs& r, std::size_t j, CollisionLanes& acc) {
    const int lane = static_cast<int>(j & 3);
    const bool same = r.rf == r.rg;
    const double xi0 = r.xi0[r.i], xi1 = r.xi1[r.i];
    const double xs0 = r.xi0[j], xs1 = r.xi1[j];
    const double u0 = xi0 - xs0, u1 = xi1 - xs1;
    double gs = 0.0, ls = 0.0;
    for (int k = 0; k < r.nang; ++k) {
        const double c = r.cos_k[k], s = r.sin_k[k];
        const double p = c * u0 + s * u1;
        const double ap = std::fabs(p);
        const double pc = p * c, ps = p * s;
        const double a0 = xi0 - pc, a1 = xi1 - ps;
        const double b0 = xs0 + pc, b1 = xs1 + ps;
        double prod;
        if (same) {
            prod = lookup(r, r.rf, a0, a1) * lookup(r, r.rf, b0, b1);
        } else {
            const double fa = lookup(r, r.rf, a0, a1), ga = lookup(r, r.rg, a0, a1);
            const double fb = lookup(r, r.rf, b0, b1), gb = lookup(r, r.rg, b0, b1);
            prod = 0.5 * (fa * gb + ga * fb);
        }
        gs += ap * prod;
        ls += ap;
    }
    const double lprod = same ? r.rf[r.i] * r.rf[j] : 0.5 * (r.rf[r.i] * r.rg[j] + r.rg[r.i] * r.rf[j]);
    acc.gain[lane] += r.pair_w[j] * gs;
    acc.loss[lane] += r.pair_w[j] * (ls * lprod);
}

}  // namespace ksl::simd::detail
