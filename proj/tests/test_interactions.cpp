#include "doctest.h"
#include "helpers.hpp"

#include "ksl/error.hpp"
#include "ksl/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ksl;

namespace {

double slice_max(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_residual(const std::vector<double>& q, const PhaseGrid& g) {
    double r = 0;
    for (std::size_t ix = 0; ix < g.nx_total; ++ix)
        r = std::max(r, mesoscopic_residuals(&q[ix * g.nxi_total], g).max());
    return r;
}

}  // namespace

TEST_CASE("post-collision velocities conserve momentum and energy") {
    const double xi[3] = {0.3, -1.1, 2.0}, xs[3] = {-0.7, 0.4, 0.1};
    const double s = 1 / std::sqrt(3.0);
    const double nh[3] = {s, -s, s};
    for (int n = 2; n <= 3; ++n) {
        const double nn = n == 2 ? 1 / std::sqrt(2.0) : s;
        const double nv[3] = {nn, -nn, n == 3 ? nn : 0.0};
        const CollisionPair p = post_collision(n, xi, xs, n == 3 ? nh : nv);
        double e0 = 0, e1 = 0;
        for (int a = 0; a < n; ++a) {
            CHECK(p.xi_prime[a] + p.xi_star_prime[a] == doctest::Approx(xi[a] + xs[a]));
            e0 += xi[a] * xi[a] + xs[a] * xs[a];
            e1 += p.xi_prime[a] * p.xi_prime[a] + p.xi_star_prime[a] * p.xi_star_prime[a];
        }
        CHECK(e1 == doctest::Approx(e0));
    }
    const double bad[2] = {1.0, 0.1};
    CHECK_THROWS_AS(post_collision(2, xi, xs, bad), Error);
}

TEST_CASE("sphere rules integrate the surface measure") {
    const SphereRule c = sphere_rule(2, 16);
    CHECK(c.folded);
    double w = 0;
    for (double x : c.weights) w += x;
    CHECK(w == doctest::Approx(2 * std::numbers::pi));
    const SphereRule s = sphere_rule(3, 8);
    double ws = 0, z2 = 0;
    for (std::size_t k = 0; k < s.count(); ++k) {
        ws += s.weights[k];
        z2 += s.weights[k] * s.dirs[k * 3 + 2] * s.dirs[k * 3 + 2];
    }
    const double total = s.folded ? 2 * ws : ws;
    CHECK(total == doctest::Approx(4 * std::numbers::pi));
    CHECK((s.folded ? 2 * z2 : z2) == doctest::Approx(4 * std::numbers::pi / 3));
}

TEST_CASE("hard-sphere interaction annihilates Maxwellians") {
    auto g = test::box(2, 5, 3, 13);
    const DistributionField m = gaussian_field(g, 1, 1e6, 1, 0);
    const auto gl = hard_sphere_gain_loss(m, m, 16);
    const auto q = apply_interaction(m, KernelSpec::hard_sphere(16, false));
    CHECK(slice_max(q) <= 1e-10 * slice_max(gl.gain));
    auto g3 = test::box(1, 4, 2, 7, 3);
    const DistributionField m3 = gaussian_field(g3, 1, 1e6, 1, 0);
    const auto q3 = apply_interaction(m3, KernelSpec::hard_sphere(6, false));
    const auto gl3 = hard_sphere_gain_loss(m3, m3, 6);
    CHECK(slice_max(q3) <= 1e-10 * slice_max(gl3.gain));
}

TEST_CASE("conservative fix removes the discrete moments") {
    auto g = test::box(2, 4, 3, 9);
    const DistributionField f = test::random_field(g, 21);
    const auto raw = apply_interaction(f, KernelSpec::hard_sphere(16, false));
    const auto fixed = apply_interaction(f, KernelSpec::hard_sphere(16, true));
    double scale = 0;
    for (std::size_t ix = 0; ix < g->nx_total; ++ix) {
        double m = 0;
        for (std::size_t j = 0; j < g->nxi_total; ++j) m += g->xi_weights()[j] * f.at(ix, j);
        scale = std::max(scale, m);
    }
    CHECK(max_residual(raw, *g) > 1e-6 * scale);
    CHECK(max_residual(fixed, *g) <= 1e-12 * scale);
}

TEST_CASE("plain and weighted projections both annihilate invariants") {
    auto g = test::box(1, 3, 2, 7);
    std::vector<double> slice(g->nxi_total), act(g->nxi_total);
    for (std::size_t j = 0; j < g->nxi_total; ++j) {
        const double* xi = g->xi_at(j);
        slice[j] = std::sin(3 * xi[0]) + xi[1] * xi[1];
        act[j] = std::exp(-0.5 * (xi[0] * xi[0] + xi[1] * xi[1]));
    }
    auto plain = slice, weighted = slice;
    remove_collision_invariant_part(plain.data(), *g);
    remove_collision_invariant_part(weighted.data(), *g, act.data());
    CHECK(mesoscopic_residuals(plain.data(), *g).max() <= 1e-12);
    CHECK(mesoscopic_residuals(weighted.data(), *g).max() <= 1e-12);
    // The weighted correction is proportional to the activity, so far nodes barely move.
    CHECK(std::abs(weighted[0] - slice[0]) < std::abs(plain[0] - slice[0]));
}

TEST_CASE("hard sphere is unsupported in one dimension") {
    auto g = test::box(1, 1, 3, 5, 1);
    const DistributionField f = gaussian_field(g, 1, 1, 1, 0);
    try {
        apply_interaction(f, KernelSpec::hard_sphere());
        FAIL("expected an unsupported error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unsupported);
    }
    CHECK_NOTHROW(apply_interaction(f, KernelSpec::bgk(1.0)));
}

TEST_CASE("local Maxwellian matches discrete moments and BGK conserves them") {
    auto g = test::box(1, 5, 2, 15);
    const DistributionField f = test::random_field(g, 8);
    const LocalMaxwellian lm = local_maxwellian(&f.values()[0], *g);
    CHECK(lm.matched);
    CHECK(lm.density > 0);
    CHECK(lm.temperature > 0);
    const auto q = apply_interaction(f, KernelSpec::bgk(2.0));
    CHECK(max_residual(q, *g) <= 1e-10);
    std::vector<double> empty(g->nxi_total, 0.0);
    const LocalMaxwellian z = local_maxwellian(empty.data(), *g);
    CHECK(slice_max(z.samples) == 0.0);
}

TEST_CASE("bilinear form is symmetric and rejects BGK") {
    auto g = test::box(1, 4, 2, 9);
    const DistributionField f = test::random_field(g, 1);
    const DistributionField h = test::random_field(g, 2);
    const KernelSpec k = KernelSpec::hard_sphere(16, false);
    const auto a = apply_bilinear(f, h, k);
    const auto b = apply_bilinear(h, f, k);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).scale(slice_max(a)).epsilon(1e-12));
    CHECK_THROWS_AS(apply_bilinear(f, h, KernelSpec::bgk(1.0)), Error);
}

TEST_CASE("kernel specs validate") {
    KernelSpec k = KernelSpec::bgk(-1.0);
    CHECK_THROWS_AS(k.validate(), Error);
    KernelSpec h = KernelSpec::hard_sphere(3);
    CHECK_THROWS_AS(h.validate(), Error);
    CHECK_NOTHROW(KernelSpec::hard_sphere(16).validate());
}
