#include "ksl/simd/kernels.hpp"

#include "lane_ops.hpp"

#include <immintrin.h>

namespace ksl::simd {

namespace {

inline void store_lanes(__m256d v, double* out) {
    double tmp[lanes];
    _mm256_storeu_pd(tmp, v);
    for (int l = 0; l < lanes; ++l) out[l] += tmp[l];
}

double dot_avx2(const double* a, const double* b, std::size_t count) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + lanes <= count; j += lanes)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
    double l[lanes];
    _mm256_storeu_pd(l, acc);
    for (; j < count; ++j) l[j & 3] += a[j] * b[j];
    return detail::fold(l);
}

void moment_row_avx2(const MomentRowArgs& r, MomentSums& out) {
    if (r.n != 2) {
        scalar_kernels().moment_row(r, out);
        return;
    }
    const __m256d y0 = _mm256_set1_pd(r.y[0]), y1 = _mm256_set1_pd(r.y[1]);
    const __m256d sh = _mm256_set1_pd(r.shift), tau = _mm256_set1_pd(r.tau);
    __m256d m = _mm256_setzero_pd(), v0 = m, v1 = m, e = m, a = m, u = m, lx = m, ls = m;
    std::size_t j = 0;
    for (; j + lanes <= r.count; j += lanes) {
        const __m256d w = _mm256_loadu_pd(r.wg + j);
        const __m256d q0 = _mm256_loadu_pd(r.xi_axis[0] + j);
        const __m256d q1 = _mm256_loadu_pd(r.xi_axis[1] + j);
        const __m256d x0 = _mm256_add_pd(y0, _mm256_mul_pd(sh, q0));
        const __m256d x1 = _mm256_add_pd(y1, _mm256_mul_pd(sh, q1));
        const __m256d z0 = _mm256_sub_pd(x0, _mm256_mul_pd(tau, q0));
        const __m256d z1 = _mm256_sub_pd(x1, _mm256_mul_pd(tau, q1));
        const __m256d v2 = _mm256_add_pd(_mm256_mul_pd(q0, q0), _mm256_mul_pd(q1, q1));
        const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(x0, x0), _mm256_mul_pd(x1, x1));
        const __m256d xd = _mm256_add_pd(_mm256_mul_pd(x0, q0), _mm256_mul_pd(x1, q1));
        const __m256d z2 = _mm256_add_pd(_mm256_mul_pd(z0, z0), _mm256_mul_pd(z1, z1));
        m = _mm256_add_pd(m, w);
        v0 = _mm256_add_pd(v0, _mm256_mul_pd(w, q0));
        v1 = _mm256_add_pd(v1, _mm256_mul_pd(w, q1));
        e = _mm256_add_pd(e, _mm256_mul_pd(w, v2));
        a = _mm256_add_pd(a, _mm256_mul_pd(w, xd));
        u = _mm256_add_pd(u, _mm256_mul_pd(w, _mm256_mul_pd(_mm256_sqrt_pd(r2), _mm256_sqrt_pd(v2))));
        lx = _mm256_add_pd(lx, _mm256_mul_pd(w, r2));
        ls = _mm256_add_pd(ls, _mm256_mul_pd(w, z2));
    }
    detail::MomentLanes acc;
    store_lanes(m, acc.m);
    store_lanes(v0, acc.v[0]);
    store_lanes(v1, acc.v[1]);
    store_lanes(e, acc.e);
    store_lanes(a, acc.a);
    store_lanes(u, acc.u);
    store_lanes(lx, acc.loc_x);
    store_lanes(ls, acc.loc_shift);
    for (; j < r.count; ++j) detail::moment_element(r, j, acc);
    detail::finish_moments(acc, r.n, out);
}

struct LookupConst {
    __m256d lo0, lo1, ih0, ih1, zero, one, top, top1, nxi;
};

inline __m256d lookup_avx2(const LookupConst& c, const double* table, __m256d p0, __m256d p1) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(p0, c.lo0), c.ih0);
    const __m256d v = _mm256_mul_pd(_mm256_sub_pd(p1, c.lo1), c.ih1);
    const __m256d uc = _mm256_min_pd(_mm256_max_pd(u, c.zero), c.top);
    const __m256d vc = _mm256_min_pd(_mm256_max_pd(v, c.zero), c.top);
    const __m256d iu = _mm256_min_pd(_mm256_floor_pd(uc), c.top1);
    const __m256d iv = _mm256_min_pd(_mm256_floor_pd(vc), c.top1);
    const __m256d su = _mm256_sub_pd(uc, iu), sv = _mm256_sub_pd(vc, iv);
    const __m128i base = _mm256_cvtpd_epi32(_mm256_add_pd(_mm256_mul_pd(iu, c.nxi), iv));
    const __m128i step = _mm_set1_epi32(static_cast<int>(_mm256_cvtsd_f64(c.nxi)));
    const __m256d r00 = _mm256_i32gather_pd(table, base, 8);
    const __m256d r01 = _mm256_i32gather_pd(table + 1, base, 8);
    const __m128i row = _mm_add_epi32(base, step);
    const __m256d r10 = _mm256_i32gather_pd(table, row, 8);
    const __m256d r11 = _mm256_i32gather_pd(table + 1, row, 8);
    const __m256d osu = _mm256_sub_pd(c.one, su), osv = _mm256_sub_pd(c.one, sv);
    const __m256d lo = _mm256_add_pd(_mm256_mul_pd(osv, r00), _mm256_mul_pd(sv, r01));
    const __m256d hi = _mm256_add_pd(_mm256_mul_pd(osv, r10), _mm256_mul_pd(sv, r11));
    return _mm256_add_pd(_mm256_mul_pd(osu, lo), _mm256_mul_pd(su, hi));
}

GainLoss collision_row_avx2(const CollisionRowArgs& r) {
    const std::size_t count = std::size_t(r.nxi) * r.nxi;
    const bool same = r.rf == r.rg;
    LookupConst c;
    c.lo0 = _mm256_set1_pd(r.lo0);
    c.lo1 = _mm256_set1_pd(r.lo1);
    c.ih0 = _mm256_set1_pd(r.inv_h0);
    c.ih1 = _mm256_set1_pd(r.inv_h1);
    c.zero = _mm256_setzero_pd();
    c.one = _mm256_set1_pd(1.0);
    c.top = _mm256_set1_pd(r.nxi - 1.0);
    c.top1 = _mm256_set1_pd(r.nxi - 2.0);
    c.nxi = _mm256_set1_pd(double(r.nxi));
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d xi0 = _mm256_set1_pd(r.xi0[r.i]), xi1 = _mm256_set1_pd(r.xi1[r.i]);
    const __m256d rfi = _mm256_set1_pd(r.rf[r.i]), rgi = _mm256_set1_pd(r.rg[r.i]);
    __m256d gain = _mm256_setzero_pd(), loss = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + lanes <= count; j += lanes) {
        const __m256d xs0 = _mm256_loadu_pd(r.xi0 + j), xs1 = _mm256_loadu_pd(r.xi1 + j);
        const __m256d u0 = _mm256_sub_pd(xi0, xs0), u1 = _mm256_sub_pd(xi1, xs1);
        __m256d gs = _mm256_setzero_pd(), ls = _mm256_setzero_pd();
        for (int k = 0; k < r.nang; ++k) {
            const __m256d cc = _mm256_set1_pd(r.cos_k[k]), ss = _mm256_set1_pd(r.sin_k[k]);
            const __m256d p = _mm256_add_pd(_mm256_mul_pd(cc, u0), _mm256_mul_pd(ss, u1));
            const __m256d ap = _mm256_andnot_pd(sign, p);
            const __m256d pc = _mm256_mul_pd(p, cc), ps = _mm256_mul_pd(p, ss);
            const __m256d a0 = _mm256_sub_pd(xi0, pc), a1 = _mm256_sub_pd(xi1, ps);
            const __m256d b0 = _mm256_add_pd(xs0, pc), b1 = _mm256_add_pd(xs1, ps);
            __m256d prod;
            if (same) {
                prod = _mm256_mul_pd(lookup_avx2(c, r.rf, a0, a1), lookup_avx2(c, r.rf, b0, b1));
            } else {
                const __m256d fa = lookup_avx2(c, r.rf, a0, a1), ga = lookup_avx2(c, r.rg, a0, a1);
                const __m256d fb = lookup_avx2(c, r.rf, b0, b1), gb = lookup_avx2(c, r.rg, b0, b1);
                prod = _mm256_mul_pd(half, _mm256_add_pd(_mm256_mul_pd(fa, gb), _mm256_mul_pd(ga, fb)));
            }
            gs = _mm256_add_pd(gs, _mm256_mul_pd(ap, prod));
            ls = _mm256_add_pd(ls, ap);
        }
        const __m256d rfj = _mm256_loadu_pd(r.rf + j);
        __m256d lprod;
        if (same) {
            lprod = _mm256_mul_pd(rfi, rfj);
        } else {
            const __m256d rgj = _mm256_loadu_pd(r.rg + j);
            lprod = _mm256_mul_pd(half, _mm256_add_pd(_mm256_mul_pd(rfi, rgj), _mm256_mul_pd(rgi, rfj)));
        }
        const __m256d pw = _mm256_loadu_pd(r.pair_w + j);
        gain = _mm256_add_pd(gain, _mm256_mul_pd(pw, gs));
        loss = _mm256_add_pd(loss, _mm256_mul_pd(pw, _mm256_mul_pd(ls, lprod)));
    }
    detail::CollisionLanes acc;
    store_lanes(gain, acc.gain);
    store_lanes(loss, acc.loss);
    for (; j < count; ++j) detail::collision_element(r, j, acc);
    return {detail::fold(acc.gain), detail::fold(acc.loss)};
}

}  // namespace

const KernelTable* avx2_kernels_impl() {
    static const KernelTable table{"avx2", dot_avx2, moment_row_avx2, collision_row_avx2};
    return &table;
}

}  // namespace ksl::simd
