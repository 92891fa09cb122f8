#include "ksl/reduce.hpp"

#include "ksl/simd/kernels.hpp"

namespace ksl {

double pairwise_sum(const double* a, std::size_t count) {
    if (count == 0) return 0.0;
    if (count <= 8) {
        double s = a[0];
        for (std::size_t i = 1; i < count; ++i) s += a[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(a, half) + pairwise_sum(a + half, count - half);
}

double dot(const double* a, const double* b, std::size_t count) {
    return simd::active().dot(a, b, count);
}

}  // namespace ksl
