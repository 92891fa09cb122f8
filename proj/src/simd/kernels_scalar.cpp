#include "ksl/simd/kernels.hpp"

#include "lane_ops.hpp"

namespace ksl::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t count) {
    double acc[lanes] = {};
    for (std::size_t j = 0; j < count; ++j) acc[j & 3] += a[j] * b[j];
    return detail::fold(acc);
}

void moment_row_scalar(const MomentRowArgs& r, MomentSums& out) {
    detail::MomentLanes acc;
    for (std::size_t j = 0; j < r.count; ++j) detail::moment_element(r, j, acc);
    detail::finish_moments(acc, r.n, out);
}

GainLoss collision_row_scalar(const CollisionRowArgs& r) {
    detail::CollisionLanes acc;
    const std::size_t count = std::size_t(r.nxi) * r.nxi;
    for (std::size_t j = 0; j < count; ++j) detail::collision_element(r, j, acc);
    return {detail::fold(acc.gain), detail::fold(acc.loss)};
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", dot_scalar, moment_row_scalar, collision_row_scalar};
    return table;
}

}  // namespace ksl::simd
