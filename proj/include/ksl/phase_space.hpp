#pragma once

#include "ksl/grid.hpp"

#include <memory>
#include <vector>

namespace ksl {

// How the stored samples relate to the physical density f(x, xi, t).
//   physical:       values[i, j] = f(x_i, xi_j, t)
//   characteristic: values[i, j] = f(x_i + t xi_j, xi_j, t), the pulled-back field
enum class Coordinates { physical, characteristic };

class DistributionField {
public:
    DistributionField() = default;
    DistributionField(std::shared_ptr<const PhaseGrid> grid, double time,
                      Coordinates coords = Coordinates::physical);
    DistributionField(std::shared_ptr<const PhaseGrid> grid, std::vector<double> values, double time,
                      Coordinates coords = Coordinates::physical);

    const PhaseGrid& grid() const { return *grid_; }
    const std::shared_ptr<const PhaseGrid>& grid_ptr() const { return grid_; }
    double time() const { return time_; }
    Coordinates coords() const { return coords_; }
    bool pulled_back() const { return coords_ == Coordinates::characteristic; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double at(std::size_t ix, std::size_t jxi) const { return values_[ix * grid_->nxi_total + jxi]; }
    double& at(std::size_t ix, std::size_t jxi) { return values_[ix * grid_->nxi_total + jxi]; }

    DistributionField with_values(std::vector<double> v) const {
        return DistributionField(grid_, std::move(v), time_, coords_);
    }

    // Throws argument error on negative or non-finite samples.
    void validate() const;
    double max_value() const;

private:
    std::shared_ptr<const PhaseGrid> grid_;
    std::vector<double> values_;
    double time_ = 0.0;
    Coordinates coords_ = Coordinates::physical;
};

std::shared_ptr<const PhaseGrid> make_grid(const GridSpec& spec);

// amp * exp(-|x - t xi|^2 / x_width^2 - |xi|^2 / xi_width^2) sampled at every node.
DistributionField gaussian_field(std::shared_ptr<const PhaseGrid> grid, double amp, double x_width,
                                 double xi_width, double t);

// Multilinear interpolation over the 2n-dimensional cell holding (x, xi); zero outside the box.
// Reads the stored samples as they are, whatever the field's coordinates.
double interpolate(const DistributionField& field, const double* x, const double* xi);

// Physical density at (x, xi) for either storage convention.
double sample_physical(const DistributionField& field, const double* x, const double* xi);

// g(x, xi) = f(x + t xi, xi, t). A characteristic field is returned unchanged.
DistributionField pullback(const DistributionField& field);

// Physical samples on the grid nodes. A physical field is returned unchanged.
DistributionField to_physical(const DistributionField& field);

// result(x_i, xi_j) = src(x_i - tau xi_j, xi_j) for every node, using the same cell location and
// zero extension as interpolate(). Aligned shifts reduce to index copies and are bit exact.
std::vector<double> shift_along_characteristics(const PhaseGrid& grid, const std::vector<double>& src,
                                                double tau, bool* exact = nullptr);
// Same, but positions outside the box take the value at the nearest face.
std::vector<double> shift_clamped(const PhaseGrid& grid, const std::vector<double>& src, double tau);

// True when tau * xi_j / hx is an integer for every velocity node and axis.
bool shift_is_exact(const PhaseGrid& grid, double tau);

// Largest sample on the outer faces of the box relative to the global maximum.
double boundary_ratio(const DistributionField& field);
void warn_if_boundary_heavy(const DistributionField& field, const char* what);

struct FrameSpec {
    enum class Kind { maxwellian, transported_field };
    Kind kind = Kind::maxwellian;
    int n = 2;
    double amplitude = 1.0;
    double x_width = 1.0;
    double xi_width = 1.0;
    // For transported_field: a physical field at time 0 whose transport defines the frame.
    std::shared_ptr<const DistributionField> initial;
};

// lambda(x, xi, t) = lambda(x - t xi, xi, 0), evaluated in closed form for the Maxwellian family.
double frame_eval(const FrameSpec& spec, const double* x, const double* xi, double t);

}  // namespace ksl
