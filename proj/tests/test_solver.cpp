#include "doctest.h"
#include "helpers.hpp"

#include "ksl/error.hpp"
#include "ksl/moments.hpp"
#include "ksl/solver.hpp"

#include <cmath>

using namespace ksl;

TEST_CASE("zero kernel conserves exactly and A grows with slope E") {
    auto g = test::box(5, 5, 13, 13);
    const DistributionField f0 = pullback(gaussian_field(g, 0.4, 1, 1, 0));
    RunConfig cfg;
    cfg.dt = 0.3;
    cfg.steps = 20;
    const History h = run(f0, cfg);
    REQUIRE(h.rows.size() == 21);
    const MomentReport& first = h.rows.front().report;
    for (const auto& row : h.rows) {
        CHECK(row.report.M == first.M);
        CHECK(row.report.E == first.E);
        CHECK(row.report.A == doctest::Approx(first.A + row.report.time * first.E).epsilon(1e-12));
        CHECK(row.clipped_mass == 0.0);
    }
    CHECK(h.clipped_total == 0.0);
}

TEST_CASE("aligned hard-sphere steps conserve to rounding") {
    // hx = hxi = 0.5 and dt = 2 make every shift an index copy.
    auto g = test::box(6, 2, 25, 9);
    DistributionField f = pullback(gaussian_field(g, 0.05, 1, 0.8, 0));
    const MomentReport m0 = compute_moments(f);
    for (int k = 0; k < 2; ++k) {
        const StepResult s = step(f, 2.0, KernelSpec::hard_sphere(16, true));
        CHECK(s.exact_shift);
        CHECK(s.clipped_mass == 0.0);
        const MomentReport m1 = compute_moments(s.field);
        CHECK(std::abs(m1.M - m0.M) <= 1e-10 * m0.M);
        CHECK(std::abs(m1.E - m0.E) <= 1e-10 * m0.E);
        CHECK(std::abs(m1.V[0] - m0.V[0]) <= 1e-10 * m0.M);
        f = s.field;
    }
}

TEST_CASE("physical and characteristic steppers agree on free transport") {
    auto g = test::box(5, 2, 21, 9);
    const DistributionField f0 = gaussian_field(g, 1, 1, 1, 0);
    const StepResult p = step(f0, 1.0, KernelSpec::zero());
    const DistributionField c = to_physical(step(pullback(f0), 1.0, KernelSpec::zero()).field);
    for (std::size_t i = 0; i < p.field.values().size(); ++i)
        CHECK(c.values()[i] == doctest::Approx(p.field.values()[i]).scale(1.0).epsilon(1e-14));
}

TEST_SUITE("positivity") {
TEST_CASE("default hard-sphere run clips at most 1e-6 of the mass") {
    auto g = test::box(5, 5, 13, 13);
    const DistributionField f0 = pullback(gaussian_field(g, 0.4, 1, 1, 0));
    RunConfig cfg;
    cfg.dt = 0.03;
    cfg.steps = 50;
    cfg.kernel = KernelSpec::hard_sphere(16, true);
    const History h = run(f0, cfg);
    const double M = h.rows.front().report.M;
    CHECK(h.clipped_total <= 1e-6 * M);
    CHECK(std::abs(h.rows.back().report.M - M) <= 1e-4 * M);
}
}

TEST_CASE("run configuration and budgets are validated") {
    auto g = test::box(1, 1, 3, 3);
    const DistributionField f0 = gaussian_field(g, 1, 1, 1, 0);
    CHECK_THROWS_AS(step(f0, 0.0, KernelSpec::zero()), Error);
    RunConfig bad;
    bad.dt = -1;
    CHECK_THROWS_AS(run(f0, bad), Error);
    RunConfig snap;
    snap.record_every = 2;
    snap.snapshot_every = 3;
    CHECK_THROWS_AS(snap.validate(), Error);
    RunConfig tight;
    tight.snapshot_every = 1;
    tight.snapshot_budget_bytes = 64;
    try {
        run(f0, tight);
        FAIL("expected a budget error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::budget);
    }
    DistributionField neg = f0;
    neg.at(0, 0) = -1;
    CHECK_THROWS_AS(run(neg, RunConfig{}), Error);
}

TEST_CASE("history records snapshots and running averages") {
    auto g = test::box(3, 3, 7, 7);
    RunConfig cfg;
    cfg.dt = 0.5;
    cfg.steps = 6;
    cfg.record_every = 2;
    cfg.snapshot_every = 2;
    const History h = run(pullback(gaussian_field(g, 1, 1, 1, 0)), cfg);
    CHECK(h.rows.size() == 4);
    CHECK(h.snapshots.size() == 4);
    CHECK(h.gamma_average.size() == h.rows.size());
    CHECK(h.snapshots.back().time() == doctest::Approx(3.0));
}
