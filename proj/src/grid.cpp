#include "ksl/grid.hpp"

#include "ksl/error.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace ksl {

namespace {

WarningSink g_sink = nullptr;

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

void fill_tensor(int n, int count, const Vec& lo, const Vec& h, std::vector<double>& nodes,
                 std::vector<double>& weights) {
    const std::size_t total = ipow(count, n);
    const auto w1 = trapezoid_weights(count, 1.0);
    nodes.assign(total * n, 0.0);
    weights.assign(total, 1.0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int a = n - 1; a >= 0; --a) {
            const int i = static_cast<int>(rem % count);
            rem /= count;
            nodes[flat * n + a] = lo[a] + i * h[a];
            weights[flat] *= w1[i] * h[a];
        }
    }
}

}  // namespace

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::argument: return "argument";
        case ErrorKind::validation: return "validation";
        case ErrorKind::budget: return "budget";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::format_magic: return "format_magic";
        case ErrorKind::format_version: return "format_version";
        case ErrorKind::truncated: return "truncated";
        case ErrorKind::io: return "io";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::runtime: return "runtime";
    }
    return "unknown";
}

void set_warning_sink(WarningSink sink) { g_sink = sink; }

void warn(const std::string& code, const std::string& message) {
    if (g_sink) {
        g_sink(code, message);
        return;
    }
    std::cerr << "warning [" << code << "]: " << message << "\n";
}

std::vector<double> trapezoid_weights(int count, double h) {
    std::vector<double> w(count, h);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

PhaseGrid::PhaseGrid(const GridSpec& s) {
    if (s.n < 1 || s.n > 3) fail(ErrorKind::argument, "grid.n must be 1, 2 or 3");
    if (s.nx < 2 || s.nxi < 2) fail(ErrorKind::argument, "grid node counts must be >= 2");
    for (int a = 0; a < s.n; ++a) {
        if (!(s.x_lo[a] < s.x_hi[a])) fail(ErrorKind::argument, "grid.x_lo must be < grid.x_hi");
        if (!(s.xi_lo[a] < s.xi_hi[a])) fail(ErrorKind::argument, "grid.xi_lo must be < grid.xi_hi");
    }
    const double total = std::pow(double(s.nx), s.n) * std::pow(double(s.nxi), s.n);
    if (total * sizeof(double) > double(s.budget_bytes)) {
        fail(ErrorKind::budget, "grid needs " + std::to_string(total) + " values (" +
                                    std::to_string(total * 8.0 / (1 << 20)) +
                                    " MiB), over the memory budget of " +
                                    std::to_string(double(s.budget_bytes) / (1 << 20)) + " MiB");
    }
    n = s.n;
    nx = s.nx;
    nxi = s.nxi;
    x_lo = s.x_lo;
    x_hi = s.x_hi;
    xi_lo = s.xi_lo;
    xi_hi = s.xi_hi;
    for (int a = 0; a < 3; ++a) {
        hx[a] = a < n ? (x_hi[a] - x_lo[a]) / (nx - 1) : 0.0;
        hxi[a] = a < n ? (xi_hi[a] - xi_lo[a]) / (nxi - 1) : 0.0;
    }
    nx_total = ipow(nx, n);
    nxi_total = ipow(nxi, n);
    size = nx_total * nxi_total;
    fill_tensor(n, nx, x_lo, hx, x_nodes_, wx_);
    fill_tensor(n, nxi, xi_lo, hxi, xi_nodes_, wxi_);
    for (int a = 0; a < n; ++a) {
        xi_soa_[a].resize(nxi_total);
        for (std::size_t j = 0; j < nxi_total; ++j) xi_soa_[a][j] = xi_nodes_[j * n + a];
    }
}

double PhaseGrid::max_speed() const {
    double best = 0;
    for (std::size_t j = 0; j < nxi_total; ++j) {
        double s = 0;
        for (int a = 0; a < n; ++a) s += xi_nodes_[j * n + a] * xi_nodes_[j * n + a];
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

bool PhaseGrid::same_as(const PhaseGrid& o) const {
    if (n != o.n || nx != o.nx || nxi != o.nxi) return false;
    for (int a = 0; a < n; ++a) {
        if (x_lo[a] != o.x_lo[a] || x_hi[a] != o.x_hi[a] || xi_lo[a] != o.xi_lo[a] ||
            xi_hi[a] != o.xi_hi[a])
            return false;
    }
    return true;
}

}  // namespace ksl
