#pragma once

#include "ksl/phase_space.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace test {

inline std::shared_ptr<const ksl::PhaseGrid> box(double xb, double vb, int nx, int nxi, int n = 2) {
    ksl::GridSpec s;
    s.n = n;
    s.x_lo = {-xb, -xb, -xb};
    s.x_hi = {xb, xb, xb};
    s.xi_lo = {-vb, -vb, -vb};
    s.xi_hi = {vb, vb, vb};
    s.nx = nx;
    s.nxi = nxi;
    return ksl::make_grid(s);
}

// Positive field exp(-|xi|^2 / 2) (0.5 + U[0, 1)) with a fixed seed.
inline ksl::DistributionField random_field(std::shared_ptr<const ksl::PhaseGrid> g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(g->size);
    for (std::size_t ix = 0; ix < g->nx_total; ++ix)
        for (std::size_t j = 0; j < g->nxi_total; ++j) {
            const double* xi = g->xi_at(j);
            double r2 = 0;
            for (int a = 0; a < g->n; ++a) r2 += xi[a] * xi[a];
            v[ix * g->nxi_total + j] = std::exp(-0.5 * r2) * (0.5 + u(rng));
        }
    return ksl::DistributionField(g, std::move(v), 0.0);
}

inline double total_mass(const ksl::DistributionField& f) {
    const ksl::PhaseGrid& g = f.grid();
    double m = 0;
    for (std::size_t ix = 0; ix < g.nx_total; ++ix)
        for (std::size_t j = 0; j < g.nxi_total; ++j) m += g.x_weights()[ix] * g.xi_weights()[j] * f.at(ix, j);
    return m;
}

}  // namespace test
