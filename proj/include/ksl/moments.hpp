#pragma once

#include "ksl/phase_space.hpp"

#include <vector>

namespace ksl {

struct MomentReport {
    double time = 0;
    int n = 2;
    double M = 0;
    Vec V{};
    double E = 0;
    double A = 0;          // int int f x.xi
    double U = 0;          // int int f |x||xi|
    double loc_x = 0;      // int int f |x|^2
    double loc_shift = 0;  // int int f |x - t xi|^2
};

struct ConeSpec {
    Vec x0{};
    double c = 0.3;  // apex angle, 0 < c < pi/2
    double v = 0.3;  // puncture radius
    void validate() const;
};

// Trapezoid moments over the full grid. Characteristic fields are integrated in their own
// coordinates (x = y + t xi), which is the same integral over all of R^n.
MomentReport compute_moments(const DistributionField& field);

// U - A, clamped below at 0 only against rounding of exactly parallel x and xi.
double relative_angular_gap(const MomentReport& report);
// Max of the gaps over recorded times; throws on an empty list.
double relative_angular_norm(const std::vector<MomentReport>& reports);

// int int f (x - x0).xi / |x - x0|; the node x = x0 contributes 0.
double morawetz(const DistributionField& field, const double* x0);

// |xi| < v, or the angle between x - x0 and xi lies outside [c, pi - c]. At x = x0 only the
// puncture decides.
bool cone_contains(const ConeSpec& spec, int n, const double* x, const double* xi);
double mass_in_gamma(const DistributionField& field, const ConeSpec& spec);

// int int over |x - center| <= R and |xi| >= v_floor of f |xi|^2, or of f when mass is set.
double energy_in_ball(const DistributionField& field, const double* center, double R, double v_floor,
                      bool mass = false);

// Fraction of the mass whose physical position lies outside the position box. Physical fields
// cannot represent such mass and report 0.
double leakage(const DistributionField& field);

// Everything written per CSV row besides the conserved moments.
struct DiagnosticsSpec {
    Vec observer{};        // x0 for the Morawetz functional
    ConeSpec cone{};
    Vec ball_center{};
    double ball_radius = 1.0;
    double ball_v_floor = 0.0;
    bool ball_mass = false;
};

struct DiagnosticRow {
    MomentReport report;
    double gap = 0, morawetz = 0, mass_gamma = 0, energy_ball = 0, leakage = 0, clipped_mass = 0;
};

DiagnosticRow diagnose(const DistributionField& field, const DiagnosticsSpec& spec, double clipped_mass);

}  // namespace ksl
