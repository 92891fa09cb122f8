#pragma once

#include <cstddef>

namespace ksl::simd {

// All reductions accumulate into four lanes (element j goes to lane j % 4) and finish as
// (l0 + l1) + (l2 + l3). The scalar kernels follow the same order, so every backend returns
// bit-identical results.
constexpr int lanes = 4;

struct MomentSums {
    double m = 0, v[3] = {0, 0, 0}, e = 0, a = 0, u = 0, loc_x = 0, loc_shift = 0;
};

// One x-row of moment quadrature. y is the stored position and x = y + shift * xi the physical
// one (shift = 0 for physical fields); loc_shift uses |x - tau * xi|^2 with tau the field time.
// wg[j] = weight_j * value_j and xi_axis[a][j] holds velocity coordinates.
struct MomentRowArgs {
    int n;
    const double* y;
    double shift;
    double tau;
    const double* const* xi_axis;
    const double* wg;
    std::size_t count;
};

// Hard-sphere row for n = 2 at one velocity node xi_i. Post-collision samples are bilinear
// lookups of the ratio tables rf, rg (face values beyond the velocity box). The pair weight array
// holds trapezoid weight times envelope at xi_*.
struct CollisionRowArgs {
    int nxi;                 // nodes per velocity axis
    double lo0, lo1;         // velocity box origin
    double inv_h0, inv_h1;   // reciprocal spacings
    const double* xi0;       // node coordinates, flat index
    const double* xi1;
    const double* rf;        // ratio tables, flat index
    const double* rg;
    const double* pair_w;
    const double* cos_k;     // half set of directions; the opposite half is folded in
    const double* sin_k;
    int nang;
    std::size_t i;           // the velocity node being evaluated
};

struct GainLoss {
    double gain = 0, loss = 0;
};

struct KernelTable {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t count);
    void (*moment_row)(const MomentRowArgs& args, MomentSums& out);
    GainLoss (*collision_row)(const CollisionRowArgs& args);
};

const KernelTable& scalar_kernels();
// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

// Active backend: AVX2 when available unless KSL_SIMD=scalar is set or select() overrides it.
const KernelTable& active();
// "auto", "scalar" or "avx2". Returns false for other names or an unavailable backend.
bool select(const char* name);

}  // namespace ksl::simd
