#include "doctest.h"
#include "helpers.hpp"

#include "ksl/config.hpp"
#include "ksl/error.hpp"
#include "ksl/io.hpp"
#include "ksl/solver.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace ksl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ksl_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

ErrorKind kind_of_read(const fs::path& p) {
    try {
        read_snapshot(p.string());
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::runtime;
}

bool has_issue(const ConfigError& e, const std::string& needle) {
    return std::any_of(e.issues().begin(), e.issues().end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
    auto g = test::box(2, 3, 5, 7);
    DistributionField f = test::random_field(g, 4);
    f = DistributionField(g, f.values(), 1.25);
    const fs::path p = scratch("rt.kslb");
    write_snapshot(f, p.string());
    const DistributionField r = read_snapshot(p.string());
    CHECK(r.time() == 1.25);
    CHECK(r.grid().same_as(*g));
    CHECK(std::memcmp(r.values().data(), f.values().data(), f.values().size() * sizeof(double)) == 0);
}

TEST_CASE("snapshot read errors name their kind") {
    auto g = test::box(1, 1, 3, 3);
    const fs::path p = scratch("good.kslb");
    write_snapshot(gaussian_field(g, 1, 1, 1, 0), p.string());
    const std::string bytes = slurp(p);

    const fs::path magic = scratch("magic.kslb");
    spit(magic, "XXXX" + bytes.substr(4));
    CHECK(kind_of_read(magic) == ErrorKind::format_magic);

    std::string v = bytes;
    v[4] = 9;
    const fs::path version = scratch("version.kslb");
    spit(version, v);
    CHECK(kind_of_read(version) == ErrorKind::format_version);

    const fs::path cut = scratch("cut.kslb");
    spit(cut, bytes.substr(0, bytes.size() - 5));
    CHECK(kind_of_read(cut) == ErrorKind::truncated);

    CHECK(kind_of_read(scratch("missing.kslb")) == ErrorKind::io);
}

TEST_CASE("diagnostics CSV has a fixed header and is deterministic") {
    for (int n = 1; n <= 3; ++n) {
        const std::string h = csv_header(n);
        CHECK(std::count(h.begin(), h.end(), ',') + 1 == 13 + n);
    }
    auto g = test::box(3, 3, 7, 7);
    RunConfig cfg;
    cfg.dt = 0.2;
    cfg.steps = 5;
    cfg.kernel = KernelSpec::bgk(1.0);
    const DistributionField f0 = pullback(gaussian_field(g, 1, 1, 1, 0));
    const std::string a = diagnostics_csv(run(f0, cfg).rows, 2);
    const std::string b = diagnostics_csv(run(f0, cfg).rows, 2);
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), '\n') == 7);
}

TEST_CASE("manifest rows reproduce the run diagnostics") {
    auto g = test::box(3, 3, 7, 7);
    RunConfig cfg;
    cfg.dt = 0.2;
    cfg.steps = 4;
    cfg.snapshot_every = 1;
    cfg.kernel = KernelSpec::bgk(1.0);
    const History h = run(pullback(gaussian_field(g, 1, 1, 1, 0)), cfg);
    const fs::path dir = scratch("manifest");
    fs::remove_all(dir);
    write_history_snapshots(h, cfg.diagnostics, dir.string());
    const auto rows = rows_from_manifest((dir / "manifest.json").string());
    CHECK(diagnostics_csv(rows, 2) == diagnostics_csv(h.rows, 2));
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config parsing accepts the documented sections") {
    const ExperimentConfig c = parse_config_text(R"(
[grid]
n = 2
x_lo = [-5, -5]
x_hi = [5, 5]
nx = 9
[kernel]
variant = "bgk"
rate = 2.0
[run]
dt = 0.05 # comment
steps = 10
)");
    CHECK(c.grid.nx == 9);
    CHECK(c.kernel.variant == KernelSpec::Variant::bgk);
    CHECK(c.kernel.rate == 2.0);
    CHECK(c.run.dt == 0.05);
}

TEST_CASE("config errors list every problem") {
    try {
        parse_config_text("[grid]\nnx = 9\nbogus = 1\n[run]\ndt = -1\nsteps = \"ten\"\n");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == ErrorKind::validation);
        CHECK(has_issue(e, "line 3: unknown key grid.bogus"));
        CHECK(has_issue(e, "run.dt must be > 0"));
        CHECK(has_issue(e, "run.steps expects"));
    }
    try {
        parse_config_text("[initial.gaussian]\namplitude = 1\n[initial.snapshot]\npath = \"x.kslb\"\n");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(has_issue(e, "conflict"));
    }
}
