#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ksl {

using Vec = std::array<double, 3>;  // only the first n components are used

constexpr std::size_t default_budget_bytes = std::size_t(1) << 30;

struct GridSpec {
    int n = 2;
    Vec x_lo{-4, -4, -4}, x_hi{4, 4, 4};
    Vec xi_lo{-4, -4, -4}, xi_hi{4, 4, 4};
    int nx = 13;
    int nxi = 13;
    std::size_t budget_bytes = default_budget_bytes;
};

// Uniform node-based tensor grid over a position x velocity box.
// Nodes sit at lo + i*h with both endpoints included. Values are stored
// x-major, velocity-minor: index = ix * nxi_total + jxi, each flat index
// row-major over its axes (axis 0 slowest).
class PhaseGrid {
public:
    PhaseGrid() = default;
    explicit PhaseGrid(const GridSpec& spec);

    int n = 0;
    Vec x_lo{}, x_hi{}, xi_lo{}, xi_hi{};
    int nx = 0, nxi = 0;
    Vec hx{}, hxi{};
    std::size_t nx_total = 0, nxi_total = 0, size = 0;

    double x_coord(int axis, int i) const { return x_lo[axis] + i * hx[axis]; }
    double xi_coord(int axis, int j) const { return xi_lo[axis] + j * hxi[axis]; }

    // Precomputed node coordinates (flat index * n + axis) and trapezoid weights.
    const std::vector<double>& x_nodes() const { return x_nodes_; }
    const std::vector<double>& xi_nodes() const { return xi_nodes_; }
    const std::vector<double>& x_weights() const { return wx_; }
    const std::vector<double>& xi_weights() const { return wxi_; }
    const double* x_at(std::size_t ix) const { return &x_nodes_[ix * n]; }
    const double* xi_at(std::size_t jxi) const { return &xi_nodes_[jxi * n]; }
    // Velocity coordinates by axis: xi_axis(a)[jxi].
    const double* xi_axis(int a) const { return a < n ? xi_soa_[a].data() : nullptr; }

    // Largest |xi| over velocity nodes.
    double max_speed() const;

    bool same_as(const PhaseGrid& other) const;

private:
    std::vector<double> x_nodes_, xi_nodes_, wx_, wxi_;
    std::array<std::vector<double>, 3> xi_soa_;
};

// 1-D trapezoid weights for `count` nodes spaced h apart.
std::vector<double> trapezoid_weights(int count, double h);

}  // namespace ksl
