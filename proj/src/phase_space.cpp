#include "ksl/phase_space.hpp"

#include "ksl/error.hpp"
#include "ksl/locate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ksl {

DistributionField::DistributionField(std::shared_ptr<const PhaseGrid> grid, double time,
                                     Coordinates coords)
    : grid_(std::move(grid)), values_(grid_->size, 0.0), time_(time), coords_(coords) {}

DistributionField::DistributionField(std::shared_ptr<const PhaseGrid> grid, std::vector<double> values,
                                     double time, Coordinates coords)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time), coords_(coords) {
    if (values_.size() != grid_->size) fail(ErrorKind::argument, "field size does not match its grid");
}

void DistributionField::validate() const {
    for (double v : values_) {
        if (!std::isfinite(v)) fail(ErrorKind::argument, "field holds a non-finite sample");
        if (v < 0) fail(ErrorKind::argument, "field holds a negative sample");
    }
}

double DistributionField::max_value() const {
    double m = 0;
    for (double v : values_) m = std::max(m, v);
    return m;
}

std::shared_ptr<const PhaseGrid> make_grid(const GridSpec& spec) {
    return std::make_shared<const PhaseGrid>(spec);
}

DistributionField gaussian_field(std::shared_ptr<const PhaseGrid> grid, double amp, double x_width,
                                 double xi_width, double t) {
    if (!(amp > 0)) fail(ErrorKind::argument, "gaussian amp must be > 0");
    if (!(x_width > 0) || !(xi_width > 0)) fail(ErrorKind::argument, "gaussian widths must be > 0");
    DistributionField f(grid, t);
    const PhaseGrid& g = *grid;
    const double ax = 1.0 / (x_width * x_width), av = 1.0 / (xi_width * xi_width);
    for (std::size_t ix = 0; ix < g.nx_total; ++ix) {
        const double* x = g.x_at(ix);
        for (std::size_t j = 0; j < g.nxi_total; ++j) {
            const double* v = g.xi_at(j);
            double r2 = 0, v2 = 0;
            for (int a = 0; a < g.n; ++a) {
                const double d = x[a] - t * v[a];
                r2 += d * d;
                v2 += v[a] * v[a];
            }
            f.at(ix, j) = amp * std::exp(-r2 * ax - v2 * av);
        }
    }
    warn_if_boundary_heavy(f, "gaussian_field");
    return f;
}

double interpolate(const DistributionField& field, const double* x, const double* xi) {
    const PhaseGrid& g = field.grid();
    const int n = g.n;
    int cell[6];
    double frac[6];
    int count[6];
    std::size_t stride[6];
    for (int a = 0; a < n; ++a) {
        count[a] = g.nx;
        count[n + a] = g.nxi;
        if (!locate((x[a] - g.x_lo[a]) / g.hx[a], g.nx, cell[a], frac[a])) return 0.0;
        if (!locate((xi[a] - g.xi_lo[a]) / g.hxi[a], g.nxi, cell[n + a], frac[n + a])) return 0.0;
    }
    const int dims = 2 * n;
    std::size_t s = 1;
    for (int d = dims - 1; d >= 0; --d) {
        stride[d] = s;
        s *= count[d];
    }
    std::size_t base = 0;
    for (int d = 0; d < dims; ++d) base += cell[d] * stride[d];
    double acc = 0;
    for (int corner = 0; corner < (1 << dims); ++corner) {
        double w = 1;
        std::size_t idx = base;
        for (int d = 0; d < dims; ++d) {
            const bool hi = (corner >> (dims - 1 - d)) & 1;
            w *= hi ? frac[d] : 1.0 - frac[d];
            if (hi) idx += stride[d];
        }
        if (w != 0.0) acc += w * field.values()[idx];
    }
    return acc;
}

double sample_physical(const DistributionField& field, const double* x, const double* xi) {
    if (!field.pulled_back()) return interpolate(field, x, xi);
    double y[3];
    for (int a = 0; a < field.grid().n; ++a) y[a] = x[a] - field.time() * xi[a];
    return interpolate(field, y, xi);
}

bool shift_is_exact(const PhaseGrid& g, double tau) {
    for (std::size_t j = 0; j < g.nxi_total; ++j) {
        for (int a = 0; a < g.n; ++a) {
            const double d = tau * g.xi_at(j)[a] / g.hx[a];
            if (std::abs(d - std::round(d)) > locate_tol) return false;
        }
    }
    return true;
}

namespace {

std::vector<double> shift_impl(const PhaseGrid& g, const std::vector<double>& src, double tau, bool clamp) {
    const int n = g.n;
    const std::size_t nxi = g.nxi_total;
    std::vector<double> out(g.size, 0.0);
    // Per axis and source index: cell index, fraction, validity.
    std::vector<int> cell(n * g.nx);
    std::vector<double> frac(n * g.nx);
    std::vector<char> ok(n * g.nx);
    std::size_t xstride[3] = {1, 1, 1};
    for (int a = n - 2; a >= 0; --a) xstride[a] = xstride[a + 1] * g.nx;
    for (std::size_t j = 0; j < nxi; ++j) {
        const double* v = g.xi_at(j);
        for (int a = 0; a < n; ++a) {
            const double d = -tau * v[a] / g.hx[a];
            for (int i = 0; i < g.nx; ++i) {
                int c;
                double s;
                const double u = clamp ? std::clamp(i + d, 0.0, double(g.nx - 1)) : i + d;
                ok[a * g.nx + i] = locate(u, g.nx, c, s);
                cell[a * g.nx + i] = c;
                frac[a * g.nx + i] = s;
            }
        }
        for (std::size_t ix = 0; ix < g.nx_total; ++ix) {
            int ia[3];
            std::size_t rem = ix;
            bool inside = true;
            for (int a = n - 1; a >= 0; --a) {
                ia[a] = static_cast<int>(rem % g.nx);
                rem /= g.nx;
                inside = inside && ok[a * g.nx + ia[a]];
            }
            if (!inside) continue;
            std::size_t base = 0;
            for (int a = 0; a < n; ++a) base += cell[a * g.nx + ia[a]] * xstride[a];
            double acc = 0;
            for (int corner = 0; corner < (1 << n); ++corner) {
                double w = 1;
                std::size_t idx = base;
                for (int a = 0; a < n; ++a) {
                    const bool hi = (corner >> (n - 1 - a)) & 1;
                    const double s = frac[a * g.nx + ia[a]];
                    w *= hi ? s : 1.0 - s;
                    if (hi) idx += xstride[a];
                }
                if (w != 0.0) acc += w * src[idx * nxi + j];
            }
            out[ix * nxi + j] = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<double> shift_along_characteristics(const PhaseGrid& g, const std::vector<double>& src,
                                                double tau, bool* exact) {
    if (exact) *exact = shift_is_exact(g, tau);
    return shift_impl(g, src, tau, false);
}

std::vector<double> shift_clamped(const PhaseGrid& g, const std::vector<double>& src, double tau) {
    return shift_impl(g, src, tau, true);
}

DistributionField pullback(const DistributionField& field) {
    if (field.pulled_back()) return field;
    auto v = shift_along_characteristics(field.grid(), field.values(), -field.time());
    return DistributionField(field.grid_ptr(), std::move(v), field.time(), Coordinates::characteristic);
}

DistributionField to_physical(const DistributionField& field) {
    if (!field.pulled_back()) return field;
    auto v = shift_along_characteristics(field.grid(), field.values(), field.time());
    return DistributionField(field.grid_ptr(), std::move(v), field.time(), Coordinates::physical);
}

double boundary_ratio(const DistributionField& field) {
    const PhaseGrid& g = field.grid();
    const double peak = field.max_value();
    if (peak <= 0) return 0.0;
    double edge = 0;
    auto on_face = [&](std::size_t flat, int count) {
        for (int a = 0; a < g.n; ++a) {
            const std::size_t i = flat % count;
            flat /= count;
            if (i == 0 || i + 1 == std::size_t(count)) return true;
        }
        return false;
    };
    for (std::size_t ix = 0; ix < g.nx_total; ++ix) {
        const bool xface = on_face(ix, g.nx);
        for (std::size_t j = 0; j < g.nxi_total; ++j) {
            if (xface || on_face(j, g.nxi)) edge = std::max(edge, field.at(ix, j));
        }
    }
    return edge / peak;
}

void warn_if_boundary_heavy(const DistributionField& field, const char* what) {
    const double r = boundary_ratio(field);
    if (r > 1e-10) {
        warn("boundary_mass", std::string(what) + ": boundary samples reach " + std::to_string(r) +
                                  " of the peak (limit 1e-10); enlarge the box");
    }
}

double frame_eval(const FrameSpec& spec, const double* x, const double* xi, double t) {
    double y[3];
    for (int a = 0; a < spec.n; ++a) y[a] = x[a] - t * xi[a];
    if (spec.kind == FrameSpec::Kind::transported_field) return interpolate(*spec.initial, y, xi);
    double r2 = 0, v2 = 0;
    for (int a = 0; a < spec.n; ++a) {
        r2 += y[a] * y[a];
        v2 += xi[a] * xi[a];
    }
    return spec.amplitude *
           std::exp(-r2 / (spec.x_width * spec.x_width) - v2 / (spec.xi_width * spec.xi_width));
}

}  // namespace ksl
