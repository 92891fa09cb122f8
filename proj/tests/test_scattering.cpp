#include "doctest.h"
#include "helpers.hpp"

#include "ksl/error.hpp"
#include "ksl/scattering.hpp"

#include <cmath>
#include <numbers>

using namespace ksl;

namespace {

constexpr double pi = std::numbers::pi;

// Cartesian quadrature over xi* of the closed-form s-integral.
double brute_integrand(const double* x, const double* xi) {
    const double h = 0.02, R = 7;
    double sum = 0;
    for (double a = -R; a <= R + 1e-12; a += h)
        for (double b = -R; b <= R + 1e-12; b += h) {
            const double w0 = xi[0] - a, w1 = xi[1] - b;
            const double wn = std::hypot(w0, w1);
            if (wn == 0) continue;
            const double p = (x[0] * w0 + x[1] * w1) / wn;
            const double perp = x[0] * x[0] + x[1] * x[1] - p * p;
            sum += std::exp(-perp - a * a - b * b) * 0.5 * std::sqrt(pi) * std::erfc(p);
        }
    return sum * h * h;
}

ScatteringFrame plain_frame() {
    ScatteringFrame f;
    f.spec.amplitude = 1.0;
    return f;
}

}  // namespace

TEST_CASE("Omega integrand matches closed form and brute force") {
    const double z[2] = {0, 0};
    CHECK(omega_integrand(2, z, z, 0, 1) == doctest::Approx(std::pow(pi, 1.5) / 2).epsilon(1e-6));
    const double x[2] = {0.7, -0.4}, xi[2] = {-1.1, 0.3};
    CHECK(omega_integrand(2, x, xi, 0, 2) == doctest::Approx(brute_integrand(x, xi)).epsilon(2e-3));
    CHECK(omega_integrand(2, x, xi, 2, 1) < omega_integrand(2, x, xi, 0, 1));
}

TEST_CASE("closed-form constants") {
    CHECK(sphere_measure(1) == doctest::Approx(2));
    CHECK(sphere_measure(2) == doctest::Approx(2 * pi));
    CHECK(sphere_measure(3) == doctest::Approx(4 * pi));
    CHECK(omega_gaussian_bound(2) == doctest::Approx(std::sqrt(pi) * pi));
    // The tail bound decreases in z.
    CHECK(omega_tail_bound(1, 8, 2) < omega_tail_bound(1, 4, 2));
}

TEST_CASE("observer norm of the frame itself is its amplitude ratio") {
    auto g = test::box(3, 3, 7, 7);
    const ScatteringFrame fr = plain_frame();
    const DistributionField lam = gaussian_field(g, 0.25, 1, 1, 0);
    CHECK(observer_norm(lam, fr) == doctest::Approx(0.25));
    const SpaceTimeField tr = transport_trajectory(pullback(lam), 0.5, 4);
    CHECK(tr.snapshots.size() == 5);
    CHECK(scattering_norm(tr, fr) == doctest::Approx(0.25));
    CHECK(scattering_distance(tr, tr, fr) == 0.0);
}

TEST_CASE("solution map of the zero kernel is the constant pullback") {
    auto g = test::box(3, 2, 7, 5);
    const DistributionField f0 = gaussian_field(g, 0.1, 1, 1, 0);
    const SpaceTimeField tr = transport_trajectory(f0, 0.5, 3);
    const SpaceTimeField phi = solution_map(f0, tr, KernelSpec::zero());
    REQUIRE(phi.snapshots.size() == tr.snapshots.size());
    for (const auto& s : phi.snapshots)
        for (std::size_t i = 0; i < s.values().size(); ++i) CHECK(s.values()[i] == doctest::Approx(f0.values()[i]));
}

TEST_CASE("small Picard iteration contracts and converges") {
    auto g = test::box(4, 4, 9, 9);
    const ScatteringFrame fr = plain_frame();
    const DistributionField f0 = gaussian_field(g, 0.002, 1, 1, 0);
    PicardConfig cfg;
    cfg.N = 0.005;
    cfg.T = 1.0;
    cfg.steps = 4;
    cfg.tol = 1e-10;
    const PicardResult r = picard_build(f0, fr, KernelSpec::hard_sphere(16, true), cfg);
    CHECK(r.record.converged);
    for (double q : r.record.ratios) CHECK(q < 0.5);
    for (double n : r.record.norms) CHECK(n <= cfg.N);
    // Starting from a different guess reaches the same fixed point.
    PicardConfig other = cfg;
    other.initial_scale = 0.5;
    const PicardResult s = picard_build(f0, fr, KernelSpec::hard_sphere(16, true), other);
    CHECK(scattering_distance(r.trajectory, s.trajectory, fr) <= 4 * cfg.tol);
    PicardConfig big = cfg;
    big.N = 0.001;
    CHECK_THROWS_AS(picard_build(f0, fr, KernelSpec::hard_sphere(16, true), big), Error);
}

TEST_CASE("linear state and residual") {
    auto g = test::box(4, 4, 9, 9);
    const ScatteringFrame fr = plain_frame();
    const DistributionField f0 = gaussian_field(g, 0.002, 1, 1, 0);
    const SpaceTimeField tr = transport_trajectory(f0, 0.5, 4);
    const LinearState ls = extract_linear_state(tr, fr, 1.0, 1e-6);
    CHECK(ls.tail_proxy == 0.0);
    const auto res = scattering_residual(tr, ls.f_inf, fr, 1.0);
    for (double r : res) CHECK(r <= 1e-12);
}
