#pragma once

#include <cstddef>
#include <vector>

namespace ksl {

// Fixed-order pairwise summation. Callers compute per-row partials (possibly in parallel)
// and combine them here, so results do not depend on thread count or scheduling.
double pairwise_sum(const double* a, std::size_t count);
inline double pairwise_sum(const std::vector<double>& a) { return pairwise_sum(a.data(), a.size()); }

// Lane-striped dot product through the active SIMD backend.
double dot(const double* a, const double* b, std::size_t count);

}  // namespace ksl
