#include "doctest.h"
#include "helpers.hpp"

#include "ksl/interactions.hpp"
#include "ksl/moments.hpp"
#include "ksl/reduce.hpp"
#include "ksl/simd/kernels.hpp"

#include <cstring>
#include <random>
#include <vector>

using namespace ksl;

namespace {

std::vector<double> random_vector(std::size_t count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(count);
    for (double& x : v) x = u(rng);
    return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct BackendGuard {
    ~BackendGuard() { simd::select("auto"); }
};

}  // namespace

TEST_CASE("backend selection") {
    BackendGuard guard;
    CHECK(simd::select("scalar"));
    CHECK(std::strcmp(simd::active().name, simd::scalar_kernels().name) == 0);
    CHECK_FALSE(simd::select("neon"));
    CHECK(simd::select("avx2") == (simd::avx2_kernels() != nullptr));
}

TEST_CASE("dot is bit identical across backends") {
    const simd::KernelTable* v = simd::avx2_kernels();
    if (!v) return;
    const auto& s = simd::scalar_kernels();
    for (std::size_t count : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
        const auto a = random_vector(count, 1 + unsigned(count));
        const auto b = random_vector(count, 100 + unsigned(count));
        CHECK(same_bits(s.dot(a.data(), b.data(), count), v->dot(a.data(), b.data(), count)));
    }
}

TEST_CASE("moment rows are bit identical across backends") {
    const simd::KernelTable* v = simd::avx2_kernels();
    if (!v) return;
    const auto& s = simd::scalar_kernels();
    for (int n = 1; n <= 3; ++n)
        for (std::size_t count : {1u, 6u, 13u, 169u}) {
            std::vector<std::vector<double>> axes;
            for (int a = 0; a < n; ++a) axes.push_back(random_vector(count, 7 * unsigned(a) + unsigned(count)));
            const double* ptr[3] = {nullptr, nullptr, nullptr};
            for (int a = 0; a < n; ++a) ptr[a] = axes[a].data();
            const auto wg = random_vector(count, 99);
            const double y[3] = {0.3, -1.2, 0.7};
            const simd::MomentRowArgs args{n, y, 0.8, 1.3, ptr, wg.data(), count};
            simd::MomentSums ms, mv;
            s.moment_row(args, ms);
            v->moment_row(args, mv);
            CHECK(same_bits(ms.m, mv.m));
            for (int a = 0; a < 3; ++a) CHECK(same_bits(ms.v[a], mv.v[a]));
            CHECK(same_bits(ms.e, mv.e));
            CHECK(same_bits(ms.a, mv.a));
            CHECK(same_bits(ms.u, mv.u));
            CHECK(same_bits(ms.loc_x, mv.loc_x));
            CHECK(same_bits(ms.loc_shift, mv.loc_shift));
        }
}

TEST_CASE("collision operator and moments are bit identical across backends") {
    if (!simd::avx2_kernels()) return;
    BackendGuard guard;
    auto g = test::box(3, 4, 5, 11);
    const DistributionField f = test::random_field(g, 5);
    const DistributionField h = test::random_field(g, 6);
    REQUIRE(simd::select("scalar"));
    const auto qs = hard_sphere_gain_loss(f, h, 16);
    const auto ms = compute_moments(f);
    REQUIRE(simd::select("avx2"));
    const auto qv = hard_sphere_gain_loss(f, h, 16);
    const auto mv = compute_moments(f);
    REQUIRE(qs.gain.size() == qv.gain.size());
    std::size_t differing = 0;
    for (std::size_t i = 0; i < qs.gain.size(); ++i)
        if (!same_bits(qs.gain[i], qv.gain[i]) || !same_bits(qs.loss[i], qv.loss[i])) ++differing;
    CHECK(differing == 0);
    CHECK(same_bits(ms.M, mv.M));
    CHECK(same_bits(ms.E, mv.E));
    CHECK(same_bits(ms.A, mv.A));
    CHECK(same_bits(ms.U, mv.U));
}

TEST_CASE("pairwise sum is exact on integers and order independent of partition") {
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i);
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(nullptr, 0) == 0.0);
}
