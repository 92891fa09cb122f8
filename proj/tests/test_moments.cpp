#include "doctest.h"
#include "helpers.hpp"

#include "ksl/error.hpp"
#include "ksl/moments.hpp"
#include "ksl/solver.hpp"

#include <cmath>
#include <numbers>

using namespace ksl;

namespace {
constexpr double pi2 = std::numbers::pi * std::numbers::pi;
}

TEST_CASE("gaussian moments match closed forms") {
    auto g = test::box(8, 6, 33, 25);
    const double a = 0.4, t = 1.0;
    const MomentReport r0 = compute_moments(gaussian_field(g, a, 1, 1, 0));
    CHECK(r0.M == doctest::Approx(a * pi2).epsilon(1e-10));
    CHECK(r0.E == doctest::Approx(a * pi2).epsilon(1e-10));
    CHECK(r0.loc_x == doctest::Approx(a * pi2).epsilon(1e-10));
    CHECK(std::abs(r0.A) < 1e-12);
    CHECK(std::abs(r0.V[0]) < 1e-12);
    const MomentReport r1 = compute_moments(gaussian_field(g, a, 1, 1, t));
    CHECK(r1.A == doctest::Approx(t * a * pi2).epsilon(1e-8));
    CHECK(r1.loc_x == doctest::Approx(a * pi2 * (1 + t * t)).epsilon(1e-8));
    CHECK(r1.loc_shift == doctest::Approx(a * pi2).epsilon(1e-8));
}

TEST_CASE("characteristic and physical storage give the same moments") {
    // t xi lands on nodes, so the pullback is exact away from the box faces.
    auto g = test::box(8, 3, 33, 13);
    const DistributionField phys = gaussian_field(g, 1, 1, 1, 1.0);
    const DistributionField pulled = pullback(phys);
    const MomentReport a = compute_moments(phys), b = compute_moments(pulled);
    CHECK(b.M == doctest::Approx(a.M).epsilon(1e-9));
    CHECK(b.E == doctest::Approx(a.E).epsilon(1e-9));
    CHECK(b.A == doctest::Approx(a.A).epsilon(1e-7));
    CHECK(b.loc_x == doctest::Approx(a.loc_x).epsilon(1e-7));
}

TEST_CASE("angular gap is nonnegative and the norm takes the maximum") {
    auto g = test::box(4, 3, 9, 7);
    std::vector<MomentReport> reps;
    for (unsigned s = 0; s < 4; ++s) {
        const MomentReport r = compute_moments(test::random_field(g, s));
        CHECK(relative_angular_gap(r) >= 0);
        CHECK(r.U >= std::abs(r.A) - 1e-12 * r.U);
        reps.push_back(r);
    }
    double m = 0;
    for (const auto& r : reps) m = std::max(m, relative_angular_gap(r));
    CHECK(relative_angular_norm(reps) == m);
    CHECK_THROWS_AS(relative_angular_norm({}), Error);
}

TEST_CASE("Morawetz functional vanishes on even data and grows under transport") {
    auto g = test::box(6, 3, 25, 13);
    const double x0[2] = {0, 0};
    CHECK(std::abs(morawetz(gaussian_field(g, 1, 1, 1, 0), x0)) < 1e-12);
    const DistributionField f0 = pullback(gaussian_field(g, 1, 1, 1, 0));
    double prev = -1;
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
        const double m = morawetz(transport_exact(f0, t), x0);
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("cone membership") {
    ConeSpec c;
    c.c = 0.3;
    c.v = 0.5;
    const double x[2] = {1, 0}, x0[2] = {0, 0};
    const double slow[2] = {0.1, 0.2}, along[2] = {2, 0}, across[2] = {0, 2};
    CHECK(cone_contains(c, 2, x, slow));
    CHECK(cone_contains(c, 2, x, along));
    CHECK_FALSE(cone_contains(c, 2, x, across));
    CHECK_FALSE(cone_contains(c, 2, x0, along));
    ConeSpec bad;
    bad.c = 2.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("ball energy and mass") {
    auto g = test::box(4, 4, 17, 17);
    const DistributionField f = gaussian_field(g, 1, 1, 1, 0);
    const double c[2] = {0, 0};
    const MomentReport r = compute_moments(f);
    CHECK(energy_in_ball(f, c, 100, 0) == doctest::Approx(r.E));
    CHECK(energy_in_ball(f, c, 100, 0, true) == doctest::Approx(r.M));
    CHECK(energy_in_ball(f, c, 1, 0) < r.E);
}

TEST_CASE("leakage counts mass transported out of the box") {
    auto g = test::box(3, 3, 13, 13);
    const DistributionField f0 = pullback(gaussian_field(g, 1, 1, 1, 0));
    CHECK(leakage(f0) < 1e-3);
    CHECK(leakage(transport_exact(f0, 10)) > 0.5);
    CHECK(leakage(gaussian_field(g, 1, 1, 1, 10)) == 0.0);
}
