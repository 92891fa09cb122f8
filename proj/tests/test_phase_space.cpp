#include "doctest.h"
#include "helpers.hpp"

#include "ksl/error.hpp"
#include "ksl/grid.hpp"
#include "ksl/phase_space.hpp"

#include <cmath>
#include <numbers>

using namespace ksl;

TEST_CASE("grid nodes and trapezoid weights") {
    auto g = test::box(2, 3, 5, 7);
    CHECK(g->nx_total == 25);
    CHECK(g->nxi_total == 49);
    CHECK(g->size == 25 * 49);
    CHECK(g->x_at(0)[0] == doctest::Approx(-2));
    CHECK(g->x_at(24)[1] == doctest::Approx(2));
    double wx = 0, wv = 0;
    for (double w : g->x_weights()) wx += w;
    for (double w : g->xi_weights()) wv += w;
    CHECK(wx == doctest::Approx(16.0));
    CHECK(wv == doctest::Approx(36.0));
    CHECK(g->max_speed() == doctest::Approx(3 * std::sqrt(2.0)));
}

TEST_CASE("grid rejects degenerate specs and oversize budgets") {
    GridSpec s;
    s.nx = 1;
    CHECK_THROWS_AS(make_grid(s), Error);
    GridSpec b;
    b.nx = b.nxi = 64;
    b.budget_bytes = 1024;
    try {
        make_grid(b);
        FAIL("expected a budget error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::budget);
    }
}

TEST_CASE("gaussian mass matches the closed form") {
    auto g = test::box(6, 6, 25, 25);
    const DistributionField f = gaussian_field(g, 0.4, 1, 1, 0);
    CHECK(test::total_mass(f) == doctest::Approx(0.4 * std::pow(std::numbers::pi, 2)).epsilon(1e-10));
}

TEST_CASE("aligned shifts are index copies and invert exactly") {
    auto g = test::box(3, 3, 13, 13);  // hx = hxi = 0.5
    const DistributionField f = test::random_field(g, 3);
    bool exact = false;
    const auto s = shift_along_characteristics(*g, f.values(), 1.0, &exact);
    CHECK(exact);
    CHECK(shift_is_exact(*g, 2.0));
    CHECK_FALSE(shift_is_exact(*g, 0.3));
    // Interior nodes that stay in the box under both shifts come back bit for bit.
    const auto back = shift_along_characteristics(*g, s, -1.0);
    for (std::size_t ix = 0; ix < g->nx_total; ++ix)
        for (std::size_t j = 0; j < g->nxi_total; ++j) {
            const double* x = g->x_at(ix);
            const double* xi = g->xi_at(j);
            bool inside = true;
            for (int a = 0; a < 2; ++a) inside = inside && std::abs(x[a]) + std::abs(xi[a]) <= 3 + 1e-12;
            if (inside) CHECK(back[ix * g->nxi_total + j] == f.at(ix, j));
        }
}

TEST_CASE("pullback of free transport is the initial field") {
    auto g = test::box(4, 2, 17, 9);  // hx = hxi = 0.5
    const DistributionField f0 = gaussian_field(g, 1, 1, 1, 0);
    const DistributionField ft = gaussian_field(g, 1, 1, 1, 1.0);
    const DistributionField back = pullback(ft);
    CHECK(back.pulled_back());
    for (std::size_t ix = 0; ix < g->nx_total; ++ix)
        for (std::size_t j = 0; j < g->nxi_total; ++j) {
            const double* x = g->x_at(ix);
            const double* xi = g->xi_at(j);
            if (std::abs(x[0] + xi[0]) <= 4 && std::abs(x[1] + xi[1]) <= 4)
                CHECK(back.at(ix, j) == doctest::Approx(f0.at(ix, j)).epsilon(1e-13));
        }
    const DistributionField phys = to_physical(back);
    CHECK_FALSE(phys.pulled_back());
}

TEST_CASE("clamped shift holds the face value") {
    auto g = test::box(1, 1, 3, 3);
    std::vector<double> v(g->size);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + double(i);
    const auto z = shift_along_characteristics(*g, v, 10.0);
    const auto c = shift_clamped(*g, v, 10.0);
    // xi = (1, 1) moves every source point past the lower corner.
    const std::size_t j = g->nxi_total - 1;
    for (std::size_t ix = 0; ix < g->nx_total; ++ix) {
        CHECK(z[ix * g->nxi_total + j] == 0.0);
        CHECK(c[ix * g->nxi_total + j] == v[0 * g->nxi_total + j]);
    }
}

TEST_CASE("interpolation reproduces nodes and vanishes outside") {
    auto g = test::box(2, 2, 5, 5);
    const DistributionField f = test::random_field(g, 11);
    for (std::size_t ix = 0; ix < g->nx_total; ix += 7)
        for (std::size_t j = 0; j < g->nxi_total; j += 3)
            CHECK(interpolate(f, g->x_at(ix), g->xi_at(j)) == doctest::Approx(f.at(ix, j)));
    const double out[2] = {2.5, 0}, zero[2] = {0, 0};
    CHECK(interpolate(f, out, zero) == 0.0);
    // Multilinear interpolation of an affine function is exact.
    std::vector<double> lin(g->size);
    for (std::size_t ix = 0; ix < g->nx_total; ++ix)
        for (std::size_t j = 0; j < g->nxi_total; ++j)
            lin[ix * g->nxi_total + j] = 3 + g->x_at(ix)[0] - 2 * g->xi_at(j)[1];
    const DistributionField L(g, lin, 0.0);
    const double x[2] = {0.3, -1.7}, xi[2] = {0.9, 1.1};
    CHECK(interpolate(L, x, xi) == doctest::Approx(3 + 0.3 - 2.2));
}

TEST_CASE("field validation rejects negative and non-finite samples") {
    auto g = test::box(1, 1, 3, 3);
    DistributionField f(g, std::vector<double>(g->size, 1.0), 0.0);
    CHECK_NOTHROW(f.validate());
    f.at(0, 0) = -1e-3;
    CHECK_THROWS_AS(f.validate(), Error);
    f.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("Maxwellian frame evaluation is transported exactly") {
    FrameSpec s;
    s.amplitude = 2.0;
    const double x[2] = {0.4, -0.3}, xi[2] = {1.2, 0.5};
    const double t = 1.7;
    const double y[2] = {x[0] - t * xi[0], x[1] - t * xi[1]};
    CHECK(frame_eval(s, x, xi, t) == doctest::Approx(frame_eval(s, y, xi, 0.0)));
    CHECK(frame_eval(s, y, xi, 0.0) ==
          doctest::Approx(2.0 * std::exp(-(y[0] * y[0] + y[1] * y[1] + xi[0] * xi[0] + xi[1] * xi[1]))));
}

TEST_CASE("boundary ratio flags data touching the box") {
    auto g = test::box(2, 2, 9, 9);
    CHECK(boundary_ratio(gaussian_field(g, 1, 1, 1, 0)) == doctest::Approx(std::exp(-4.0)));
}
