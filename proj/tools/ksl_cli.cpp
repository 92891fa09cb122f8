#include "ksl/acceptance.hpp"
#include "ksl/config.hpp"
#include "ksl/error.hpp"
#include "ksl/io.hpp"
#include "ksl/moments.hpp"
#include "ksl/phase_space.hpp"
#include "ksl/scattering.hpp"
#include "ksl/simd/kernels.hpp"
#include "ksl/solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, validation = 1, runtime = 2, acceptance = 3 };

std::string current_command = "ksl";

void emit_error(const std::string& kind, const std::string& message) {
    json j{{"level", "error"}, {"command", current_command}, {"kind", kind}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

void warning_to_json(const std::string& code, const std::string& message) {
    json j{{"level", "warning"}, {"command", current_command}, {"code", code}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

int exit_for(ksl::ErrorKind k) {
    switch (k) {
        case ksl::ErrorKind::io:
        case ksl::ErrorKind::convergence:
        case ksl::ErrorKind::runtime:
            return runtime;
        default:
            return validation;
    }
}

ksl::DistributionField initial_field(const ksl::ExperimentConfig& cfg) {
    if (cfg.initial.from_snapshot) return ksl::read_snapshot(cfg.initial.snapshot_path);
    return ksl::gaussian_field(ksl::make_grid(cfg.grid), cfg.initial.amplitude, cfg.initial.x_width,
                               cfg.initial.xi_width, 0.0);
}

ksl::FrameSpec frame_spec(const ksl::ExperimentConfig& cfg) {
    ksl::FrameSpec s;
    s.n = cfg.grid.n;
    s.amplitude = cfg.frame.amplitude;
    return s;
}

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool plot) {
    ksl::ExperimentConfig cfg = ksl::parse_config(config_path);
    if (cfg.run.snapshot_every == 0) cfg.run.snapshot_every = cfg.run.record_every;
    cfg.run.kernel = cfg.kernel;
    cfg.run.validate();
    fs::create_directories(out_dir);
    const ksl::History h = ksl::run(initial_field(cfg), cfg.run);
    const int n = h.rows.front().report.n;
    ksl::emit_diagnostics_csv(h.rows, n, join(out_dir, "diagnostics.csv"));
    ksl::write_history_snapshots(h, cfg.run.diagnostics, join(out_dir, "snapshots"));
    if (plot) {
        std::vector<double> t, A, fit;
        const auto& r0 = h.rows.front().report;
        for (const auto& row : h.rows) {
            t.push_back(row.report.time);
            A.push_back(row.report.A);
            fit.push_back(r0.A + row.report.time * r0.E);
        }
        ksl::write_svg_plot(join(out_dir, "angular_momentum.svg"), "A(t) and A(0) + tE",
                            {{"A(t)", t, A, false}, {"A(0) + tE", t, fit, true}});
    }
    std::printf("%zu rows, %zu snapshots, clipped mass %.3g, max leakage %.3g\n", h.rows.size(), h.snapshots.size(),
                h.clipped_total, h.max_leakage);
    return ok;
}

int cmd_moments(const std::string& manifest, const std::string& out) {
    const ksl::Manifest m = ksl::read_manifest(manifest);
    const std::string csv = ksl::diagnostics_csv(ksl::rows_from_manifest(manifest), m.n);
    if (out.empty() || out == "-") {
        std::fwrite(csv.data(), 1, csv.size(), stdout);
    } else {
        std::ofstream f(out, std::ios::binary);
        f << csv;
        if (!f) ksl::fail(ksl::ErrorKind::io, "cannot write " + out);
    }
    return ok;
}

int cmd_cones(const std::string& manifest, double c, double v, double burn_in) {
    ksl::Manifest m = ksl::read_manifest(manifest);
    ksl::ConeSpec cone = m.diagnostics.cone;
    if (c > 0) cone.c = c;
    if (v > 0) cone.v = v;
    cone.validate();
    const fs::path dir = fs::path(manifest).parent_path();
    std::printf("t,M,mass_gamma,running_average\n");
    double integral = 0, prev_t = 0, prev_g = 0, last_avg = 0, drop = 0, M0 = 0;
    for (std::size_t i = 0; i < m.snapshots.size(); ++i) {
        const ksl::DistributionField f = ksl::read_snapshot((dir / m.snapshots[i].file).string(), m.coords);
        const double M = ksl::compute_moments(f).M;
        const double g = ksl::mass_in_gamma(f, cone);
        if (i == 0) M0 = M;
        double avg = g;
        if (i > 0) {
            integral += 0.5 * (f.time() - prev_t) * (g + prev_g);
            avg = integral / (f.time() - m.snapshots.front().time);
            if (double(i) >= burn_in * double(m.snapshots.size())) drop = std::max(drop, last_avg - avg);
        }
        std::printf("%s,%s,%s,%s\n", ksl::format_double(f.time()).c_str(), ksl::format_double(M).c_str(),
                    ksl::format_double(g).c_str(), ksl::format_double(avg).c_str());
        prev_t = f.time();
        prev_g = g;
        last_avg = avg;
    }
    std::fprintf(stderr, "final running average %.6g of M, largest drop after burn-in %.3g\n", last_avg / M0, drop);
    return ok;
}

int cmd_radius(int n, double amplitude, int level) {
    ksl::OmegaConfig oc;
    oc.level = level;
    const ksl::OmegaResult om = ksl::omega(n, oc);
    const double bound = ksl::omega_gaussian_bound(n);
    std::printf("omega          %.10g\n", om.value);
    std::printf("omega bound    %.10g  (%s)\n", bound, om.value <= bound * (1 + 1e-12) ? "ok" : "VIOLATED");
    for (double z : {2.0, 4.0, 8.0}) {
        const double t = ksl::omega_tail(1.0, z, n, oc).value;
        const double b = ksl::omega_tail_bound(1.0, z, n);
        std::printf("tail R=1 z=%-3g %.6g <= %.6g  (%s)\n", z, t, b, t <= b ? "ok" : "VIOLATED");
    }
    if (n != 2 && n != 3) {
        std::printf("isotropic radius needs n = 2 or 3\n");
        return ok;
    }
    ksl::FrameSpec spec;
    spec.n = n;
    spec.amplitude = amplitude;
    const ksl::RadiusResult r = ksl::isotropic_radius(spec, om.value);
    std::printf("gain sup       %.6g\nloss sup       %.6g\n", r.gain_sup, r.loss_sup);
    std::printf("alpha          %.6g\nalpha_lower    %.6g  (%s)\n", r.alpha, r.alpha_lower,
                r.alpha >= r.alpha_lower ? "alpha >= alpha_lower" : "alpha < alpha_lower");
    return r.alpha >= r.alpha_lower ? ok : runtime;
}

int cmd_scatter(const std::string& config_path, const std::string& out_dir) {
    const ksl::ExperimentConfig cfg = ksl::parse_config(config_path);
    fs::create_directories(out_dir);
    const ksl::ScatteringFrame frame = ksl::make_frame(frame_spec(cfg));
    ksl::PicardConfig pc;
    pc.N = cfg.frame.N > 0 ? cfg.frame.N : cfg.frame.N_fraction * frame.alpha_lower;
    pc.T = cfg.frame.T;
    pc.steps = cfg.frame.steps;
    pc.tol = cfg.frame.tol;
    const ksl::DistributionField f0 = initial_field(cfg);
    const ksl::PicardResult res = ksl::picard_build(f0, frame, cfg.kernel, pc);
    const double tail_tol = cfg.frame.tail_tol > 0 ? cfg.frame.tail_tol : 1e-3 * pc.N;
    const ksl::LinearState ls = ksl::extract_linear_state(res.trajectory, frame, cfg.frame.D_radius, tail_tol);
    const std::vector<double> resid =
        ksl::scattering_residual(res.trajectory, ls.f_inf, frame, cfg.frame.D_radius);

    std::ofstream p(join(out_dir, "picard.csv"));
    p << "iteration,distance,ratio,norm\n";
    for (std::size_t k = 0; k < res.record.distances.size(); ++k)
        p << k + 1 << ',' << ksl::format_double(res.record.distances[k]) << ','
          << (k > 0 ? ksl::format_double(res.record.ratios[k - 1]) : "") << ','
          << (k < res.record.norms.size() ? ksl::format_double(res.record.norms[k]) : "") << '\n';
    std::ofstream s(join(out_dir, "residual.csv"));
    s << "t,residual\n";
    std::vector<double> t;
    for (std::size_t i = 0; i < resid.size(); ++i) {
        t.push_back(res.trajectory.dt * double(i));
        s << ksl::format_double(t.back()) << ',' << ksl::format_double(resid[i]) << '\n';
    }
    ksl::write_snapshot(ls.f_inf, join(out_dir, "f_inf.kslb"));
    std::vector<double> k;
    for (std::size_t i = 0; i < res.record.distances.size(); ++i) k.push_back(double(i + 1));
    ksl::write_svg_plot(join(out_dir, "picard.svg"), "Picard distances", {{"distance", k, res.record.distances}},
                        true);
    ksl::write_svg_plot(join(out_dir, "residual.svg"), "chi_D residual to f_inf", {{"residual", t, resid}}, true);
    std::printf("N %.6g alpha %.6g alpha_lower %.6g\n%s\ntail proxy %.3g, final residual %.3g\n", pc.N, frame.alpha,
                frame.alpha_lower, res.record.summary().c_str(), ls.tail_proxy, resid.back());
    return res.record.converged ? ok : runtime;
}

int cmd_verify(const std::string& config_path, const std::string& out_dir, const std::vector<int>& only,
               bool quiet) {
    if (!config_path.empty()) ksl::parse_config(config_path);
    ksl::AcceptanceOptions opts;
    opts.out_dir = out_dir;
    opts.config_path = config_path;
    opts.only = only;
    std::ostringstream sink;
    const auto results = ksl::run_acceptance(opts, quiet ? static_cast<std::ostream&>(sink) : std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    if (quiet)
        for (const auto& r : results)
            if (!r.pass) std::cout << "FAIL " << r.id << "  " << r.title << ": " << r.detail << '\n';
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? ok : acceptance;
}

}  // namespace

int main(int argc, char** argv) {
    ksl::set_warning_sink(warning_to_json);
    CLI::App app{"Kinetic scattering lab: transport, collisions, moments and scattering frames"};
    app.require_subcommand(1);
    std::string simd;
    app.add_option("--simd", simd, "kernel backend: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    std::string config, out, manifest;
    bool plot = false, quiet = false;
    int n = 2, level = 1;
    double amplitude = 1.0, cone_c = 0, cone_v = 0, burn_in = 0.1;
    std::vector<int> only;

    auto* sim = app.add_subcommand("simulate", "run the solver and write CSV and snapshots");
    sim->add_option("--config", config, "experiment config")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "output directory")->required();
    sim->add_flag("--plot", plot, "also write an SVG of A(t)");

    auto* mom = app.add_subcommand("moments", "recompute diagnostic rows from snapshots");
    mom->add_option("--manifest", manifest, "snapshots/manifest.json from simulate")->required()->check(CLI::ExistingFile);
    mom->add_option("--out", out, "CSV path, '-' for stdout");

    auto* cones = app.add_subcommand("cones", "running time average of the mass in punctured cones");
    cones->add_option("--manifest", manifest, "snapshots/manifest.json from simulate")->required()->check(CLI::ExistingFile);
    cones->add_option("--c", cone_c, "cone aperture (default from the manifest)");
    cones->add_option("--v", cone_v, "slow-velocity radius (default from the manifest)");
    cones->add_option("--burn-in", burn_in, "fraction of snapshots ignored in the monotonicity report");

    auto* rad = app.add_subcommand("radius", "Omega, its tails and the isotropic radius of the Maxwellian frame");
    rad->add_option("--n", n, "dimension")->check(CLI::Range(1, 3));
    rad->add_option("--amplitude", amplitude, "frame amplitude")->check(CLI::PositiveNumber);
    rad->add_option("--level", level, "quadrature refinement level")->check(CLI::Range(1, 4));

    auto* sca = app.add_subcommand("scatter", "Picard build, linear state extraction and residuals");
    sca->add_option("--config", config, "experiment config")->required()->check(CLI::ExistingFile);
    sca->add_option("--out", out, "output directory")->required();

    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--config", config, "config exercised by the infrastructure criterion")->check(CLI::ExistingFile);
    ver->add_option("--out", out, "artifact directory")->default_val("acceptance_out");
    ver->add_option("--only", only, "criterion ids")->delimiter(',');
    ver->add_flag("--quiet", quiet, "print failures and the summary only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("argument", e.what());
        return validation;
    }

    try {
        if (!simd.empty() && !ksl::simd::select(simd.c_str()))
            ksl::fail(ksl::ErrorKind::unsupported, "SIMD backend " + simd + " is not available");
        if (sim->parsed()) return current_command = "simulate", cmd_simulate(config, out, plot);
        if (mom->parsed()) return current_command = "moments", cmd_moments(manifest, out);
        if (cones->parsed()) return current_command = "cones", cmd_cones(manifest, cone_c, cone_v, burn_in);
        if (rad->parsed()) return current_command = "radius", cmd_radius(n, amplitude, level);
        if (sca->parsed()) return current_command = "scatter", cmd_scatter(config, out);
        if (ver->parsed()) return current_command = "verify", cmd_verify(config, out.empty() ? "acceptance_out" : out, only, quiet);
    } catch (const ksl::ConfigError& e) {
        for (const auto& issue : e.issues()) emit_error("validation", issue);
        return validation;
    } catch (const ksl::Error& e) {
        emit_error(ksl::error_kind_name(e.kind()), e.what());
        return exit_for(e.kind());
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return runtime;
    }
    return ok;
}
