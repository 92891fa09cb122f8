#include "ksl/solver.hpp"

#include "ksl/error.hpp"
#include "ksl/reduce.hpp"

#include <algorithm>
#include <cmath>

namespace ksl {

namespace {

double clip_negatives(const PhaseGrid& g, std::vector<double>& v) {
    std::vector<double> rows(g.nx_total, 0.0);
    const std::size_t nv = g.nxi_total;
    for (std::size_t ix = 0; ix < g.nx_total; ++ix) {
        double s = 0;
        for (std::size_t j = 0; j < nv; ++j) {
            double& x = v[ix * nv + j];
            if (x < 0) {
                s += g.xi_weights()[j] * -x;
                x = 0.0;
            }
        }
        rows[ix] = g.x_weights()[ix] * s;
    }
    return pairwise_sum(rows);
}

}  // namespace

void RunConfig::validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) fail(ErrorKind::argument, "run.dt must be > 0");
    if (steps < 1) fail(ErrorKind::argument, "run.steps must be >= 1");
    if (record_every < 1) fail(ErrorKind::argument, "run.record_every must be >= 1");
    if (snapshot_every < 0) fail(ErrorKind::argument, "run.snapshot_every must be >= 0");
    if (snapshot_every > 0 && snapshot_every % record_every != 0)
        fail(ErrorKind::argument, "run.snapshot_every must be a multiple of run.record_every");
    kernel.validate();
    diagnostics.cone.validate();
    if (!(diagnostics.ball_radius > 0)) fail(ErrorKind::argument, "ball radius must be > 0");
}

std::vector<MomentReport> History::reports() const {
    std::vector<MomentReport> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.report);
    return out;
}

StepResult step(const DistributionField& field, double dt, const KernelSpec& kernel) {
    if (!(dt > 0)) fail(ErrorKind::argument, "step dt must be > 0");
    const PhaseGrid& g = field.grid();
    const double t = field.time();
    const bool interacting = kernel.variant != KernelSpec::Variant::zero;
    StepResult res;
    bool e1 = true, e2 = true, e3 = true;
    std::vector<double> out;
    if (field.pulled_back()) {
        out = field.values();
        if (interacting) {
            const double tm = t + 0.5 * dt;
            DistributionField mid(field.grid_ptr(), shift_along_characteristics(g, field.values(), tm, &e1), tm);
            const std::vector<double> I = shift_along_characteristics(g, apply_interaction(mid, kernel), -tm, &e2);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += dt * I[i];
        }
    } else {
        out = shift_along_characteristics(g, field.values(), dt, &e1);
        if (interacting) {
            const double h = 0.5 * dt;
            DistributionField mid(field.grid_ptr(), shift_along_characteristics(g, field.values(), h, &e2),
                                  t + h);
            const std::vector<double> I = shift_along_characteristics(g, apply_interaction(mid, kernel), h, &e3);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += dt * I[i];
        }
    }
    res.clipped_mass = clip_negatives(g, out);
    res.exact_shift = e1 && e2 && e3;
    res.field = DistributionField(field.grid_ptr(), std::move(out), t + dt, field.coords());
    return res;
}

History run(const DistributionField& field0, const RunConfig& cfg) {
    cfg.validate();
    field0.validate();
    const PhaseGrid& g = field0.grid();
    if (cfg.snapshot_every > 0) {
        const std::size_t count = std::size_t(cfg.steps / cfg.snapshot_every) + 1;
        const double bytes = double(count) * double(g.size) * sizeof(double);
        if (bytes > double(cfg.snapshot_budget_bytes))
            fail(ErrorKind::budget, "snapshots need " + std::to_string(bytes) + " bytes, budget is " +
                                        std::to_string(cfg.snapshot_budget_bytes));
    }
    History h;
    DistributionField f = cfg.characteristic ? pullback(field0) : to_physical(field0);
    double pending_clip = 0;
    auto record = [&](const DistributionField& cur) {
        DiagnosticRow row = diagnose(cur, cfg.diagnostics, pending_clip);
        if (h.rows.empty()) {
            h.energy_ball_integral.push_back(0.0);
            h.gamma_average.push_back(row.mass_gamma);
        } else {
            const DiagnosticRow& prev = h.rows.back();
            const double dt = row.report.time - prev.report.time;
            const double t0 = h.rows.front().report.time;
            h.energy_ball_integral.push_back(h.energy_ball_integral.back() +
                                             0.5 * dt * (prev.energy_ball + row.energy_ball));
            const double span_prev = prev.report.time - t0, span = row.report.time - t0;
            const double integral = h.gamma_average.back() * span_prev + 0.5 * dt * (prev.mass_gamma + row.mass_gamma);
            h.gamma_average.push_back(span > 0 ? integral / span : row.mass_gamma);
        }
        h.max_leakage = std::max(h.max_leakage, row.leakage);
        h.rows.push_back(row);
        pending_clip = 0;
    };
    auto snapshot = [&](const DistributionField& cur) {
        h.snapshots.push_back(cur);
        h.snapshot_clipped.push_back(h.rows.empty() ? 0.0 : h.rows.back().clipped_mass);
    };
    record(f);
    if (cfg.snapshot_every > 0) snapshot(f);
    for (int k = 1; k <= cfg.steps; ++k) {
        StepResult s = step(f, cfg.dt, cfg.kernel);
        f = std::move(s.field);
        pending_clip += s.clipped_mass;
        h.clipped_total += s.clipped_mass;
        h.exact_shift = h.exact_shift && s.exact_shift;
        const bool rec = k % cfg.record_every == 0 || k == cfg.steps;
        const bool snap = cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0;
        if (rec) record(f);
        if (snap) snapshot(f);
    }
    return h;
}

DistributionField transport_exact(const DistributionField& field0, double t) {
    if (field0.pulled_back())
        return DistributionField(field0.grid_ptr(), field0.values(), field0.time() + t, Coordinates::characteristic);
    auto v = shift_along_characteristics(field0.grid(), field0.values(), t);
    return DistributionField(field0.grid_ptr(), std::move(v), field0.time() + t, Coordinates::physical);
}

}  // namespace ksl
