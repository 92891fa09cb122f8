#pragma once

#include "ksl/interactions.hpp"
#include "ksl/moments.hpp"
#include "ksl/phase_space.hpp"

#include <vector>

namespace ksl {

struct RunConfig {
    double dt = 0.1;
    int steps = 20;
    KernelSpec kernel;
    int record_every = 1;
    int snapshot_every = 0;  // 0 = none
    DiagnosticsSpec diagnostics;
    // Evolve the pulled-back field g(y, xi, t) = f(y + t xi, xi, t). Free transport is then
    // exact for any dt and moments cover mass that has left the position box.
    bool characteristic = true;
    std::size_t snapshot_budget_bytes = default_budget_bytes;

    void validate() const;
};

struct StepResult {
    DistributionField field;
    double clipped_mass = 0;  // trapezoid mass of the negative parts removed
    bool exact_shift = true;  // every shift in the step was an index copy
};

// One midpoint Duhamel step. Physical fields:
//   f(x, xi, t + dt) = f(x - dt xi, xi, t) + dt I(f~)(x - dt/2 xi, xi),  f~ = f transported by dt/2.
// Characteristic fields apply the same rule in pulled-back coordinates:
//   g(y, xi, t + dt) = g(y, xi, t) + dt I(f~)(y + (t + dt/2) xi, xi).
// Negative samples left by quadrature error are clipped to 0 and their mass is reported.
StepResult step(const DistributionField& field, double dt, const KernelSpec& kernel);

struct History {
    std::vector<DiagnosticRow> rows;
    std::vector<DistributionField> snapshots;
    std::vector<double> snapshot_clipped;  // row clipped_mass value at each snapshot
    std::vector<double> energy_ball_integral;  // int_0^t energy_ball dt, per row
    std::vector<double> gamma_average;         // (1/t) int_0^t mass_gamma dt, per row
    double clipped_total = 0;
    bool exact_shift = true;
    double max_leakage = 0;

    std::vector<MomentReport> reports() const;
};

History run(const DistributionField& field0, const RunConfig& cfg);

// f(x, xi, s + t) = f0(x - t xi, xi, s) in one shot. A characteristic input only has its
// time stamp advanced, which represents the same transport exactly.
DistributionField transport_exact(const DistributionField& field0, double t);

}  // namespace ksl
