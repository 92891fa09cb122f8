#include "ksl/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ksl {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string s;
    for (const auto& i : issues) s += (s.empty() ? "" : "; ") + i;
    return s;
}

struct Value {
    enum class Type { number, boolean, string, array } type = Type::number;
    double num = 0;
    bool boolean = false;
    std::string str;
    std::vector<double> arr;
    bool integral = false;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& s, double& out, bool& integral) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (...) {
        return false;
    }
    if (pos != s.size() || !std::isfinite(out)) return false;
    integral = s.find_first_of(".eE") == std::string::npos;
    return true;
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

// Reads key = value pairs into a flat "section.key" map, recording syntax errors.
std::map<std::string, Value> tokenize(const std::string& text, std::vector<std::string>& issues,
                                      std::vector<std::string>& sections) {
    std::map<std::string, Value> out;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back(where + "malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            sections.push_back(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back(where + "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string rhs = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        Value v;
        v.line = lineno;
        if (rhs == "true" || rhs == "false") {
            v.type = Value::Type::boolean;
            v.boolean = rhs == "true";
        } else if (rhs.size() >= 2 && rhs.front() == '"' && rhs.back() == '"') {
            v.type = Value::Type::string;
            v.str = rhs.substr(1, rhs.size() - 2);
        } else if (rhs.size() >= 2 && rhs.front() == '[' && rhs.back() == ']') {
            v.type = Value::Type::array;
            std::stringstream items(rhs.substr(1, rhs.size() - 2));
            std::string item;
            bool ok = true;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                double d;
                bool integral;
                if (!parse_number(item, d, integral)) ok = false;
                v.arr.push_back(d);
            }
            if (!ok) {
                issues.push_back(where + full + ": arrays may only hold numbers");
                continue;
            }
        } else if (!parse_number(rhs, v.num, v.integral)) {
            issues.push_back(where + full + ": cannot parse value '" + rhs + "'");
            continue;
        }
        if (out.count(full)) issues.push_back(where + "duplicate key " + full);
        out[full] = v;
    }
    return out;
}

const char* type_name(Value::Type t) {
    switch (t) {
        case Value::Type::number: return "number";
        case Value::Type::boolean: return "boolean";
        case Value::Type::string: return "string";
        case Value::Type::array: return "array";
    }
    return "?";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorKind::validation, join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir) {
    std::vector<std::string> issues, sections;
    const auto values = tokenize(text, issues, sections);
    ExperimentConfig cfg;
    std::map<std::string, bool> used;

    auto mismatch = [&](const std::string& key, const Value& v, const char* expected) {
        issues.push_back("line " + std::to_string(v.line) + ": " + key + " expects " + expected + ", got " +
                         type_name(v.type));
    };
    auto num = [&](const std::string& key, double& dst) {
        auto it = values.find(key);
        if (it == values.end()) return false;
        used[key] = true;
        if (it->second.type != Value::Type::number) {
            mismatch(key, it->second, "a number");
            return false;
        }
        dst = it->second.num;
        return true;
    };
    auto integer = [&](const std::string& key, int& dst) {
        auto it = values.find(key);
        if (it == values.end()) return false;
        used[key] = true;
        const Value& v = it->second;
        if (v.type != Value::Type::number || !v.integral) {
            mismatch(key, v, "an integer");
            return false;
        }
        dst = static_cast<int>(v.num);
        return true;
    };
    auto boolean = [&](const std::string& key, bool& dst) {
        auto it = values.find(key);
        if (it == values.end()) return false;
        used[key] = true;
        if (it->second.type != Value::Type::boolean) {
            mismatch(key, it->second, "true or false");
            return false;
        }
        dst = it->second.boolean;
        return true;
    };
    auto string = [&](const std::string& key, std::string& dst) {
        auto it = values.find(key);
        if (it == values.end()) return false;
        used[key] = true;
        if (it->second.type != Value::Type::string) {
            mismatch(key, it->second, "a string");
            return false;
        }
        dst = it->second.str;
        return true;
    };
    // Scalars broadcast to every axis.
    auto vec = [&](const std::string& key, Vec& dst) {
        auto it = values.find(key);
        if (it == values.end()) return false;
        used[key] = true;
        const Value& v = it->second;
        if (v.type == Value::Type::number) {
            dst = {v.num, v.num, v.num};
            return true;
        }
        if (v.type != Value::Type::array || v.arr.empty() || v.arr.size() > 3) {
            mismatch(key, v, "a number or an array of up to 3 numbers");
            return false;
        }
        for (std::size_t a = 0; a < 3; ++a) dst[a] = a < v.arr.size() ? v.arr[a] : 0.0;
        return true;
    };

    for (const auto& s : sections) {
        static const char* known[] = {"grid", "initial.gaussian", "initial.snapshot", "kernel",
                                      "run",  "frame",            "diagnostics"};
        bool ok = false;
        for (const char* k : known) ok = ok || s == k;
        if (!ok) issues.push_back("unknown section [" + s + "]");
    }

    // grid
    GridSpec& g = cfg.grid;
    integer("grid.n", g.n);
    vec("grid.x_lo", g.x_lo);
    vec("grid.x_hi", g.x_hi);
    vec("grid.xi_lo", g.xi_lo);
    vec("grid.xi_hi", g.xi_hi);
    integer("grid.nx", g.nx);
    integer("grid.nxi", g.nxi);
    double budget_mb = double(g.budget_bytes) / (1 << 20);
    if (num("grid.budget_mb", budget_mb)) g.budget_bytes = static_cast<std::size_t>(budget_mb * (1 << 20));
    if (g.n < 1 || g.n > 3) issues.push_back("grid.n must be 1, 2 or 3");
    if (g.nx < 2) issues.push_back("grid.nx must be >= 2");
    if (g.nxi < 2) issues.push_back("grid.nxi must be >= 2");
    for (int a = 0; a < std::clamp(g.n, 1, 3); ++a) {
        if (!(g.x_lo[a] < g.x_hi[a])) issues.push_back("grid.x_lo must be below grid.x_hi on every axis");
        if (!(g.xi_lo[a] < g.xi_hi[a])) issues.push_back("grid.xi_lo must be below grid.xi_hi on every axis");
    }

    // initial data
    bool has_gauss = false, has_snap = false;
    for (const auto& s : sections) {
        has_gauss = has_gauss || s == "initial.gaussian";
        has_snap = has_snap || s == "initial.snapshot";
    }
    for (const auto& [k, v] : values) {
        has_gauss = has_gauss || k.rfind("initial.gaussian.", 0) == 0;
        has_snap = has_snap || k.rfind("initial.snapshot.", 0) == 0;
    }
    if (has_gauss && has_snap)
        issues.push_back("initial data conflict: both [initial.gaussian] and [initial.snapshot] are given");
    InitialSpec& ini = cfg.initial;
    num("initial.gaussian.amplitude", ini.amplitude);
    num("initial.gaussian.x_width", ini.x_width);
    num("initial.gaussian.xi_width", ini.xi_width);
    if (!(ini.amplitude > 0)) issues.push_back("initial.gaussian.amplitude must be > 0");
    if (!(ini.x_width > 0) || !(ini.xi_width > 0)) issues.push_back("initial.gaussian widths must be > 0");
    if (has_snap) {
        ini.from_snapshot = true;
        if (!string("initial.snapshot.path", ini.snapshot_path)) {
            if (!values.count("initial.snapshot.path")) issues.push_back("initial.snapshot.path is required");
        } else {
            std::filesystem::path p(ini.snapshot_path);
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            ini.snapshot_path = p.string();
            if (!std::filesystem::exists(p)) issues.push_back("initial.snapshot.path does not exist: " + p.string());
        }
    }

    // kernel
    std::string variant = "zero";
    string("kernel.variant", variant);
    if (variant == "zero") cfg.kernel = KernelSpec::zero();
    else if (variant == "bgk") cfg.kernel = KernelSpec::bgk(1.0);
    else if (variant == "hard_sphere") cfg.kernel = KernelSpec::hard_sphere();
    else issues.push_back("kernel.variant must be zero, bgk or hard_sphere");
    num("kernel.rate", cfg.kernel.rate);
    integer("kernel.angular_nodes", cfg.kernel.angular_nodes);
    boolean("kernel.conservative_fix", cfg.kernel.conservative_fix);
    if (!(cfg.kernel.rate > 0)) issues.push_back("kernel.rate must be > 0");
    if (cfg.kernel.angular_nodes < 4 || cfg.kernel.angular_nodes % 2)
        issues.push_back("kernel.angular_nodes must be even and >= 4");

    // run
    RunConfig& r = cfg.run;
    r.kernel = cfg.kernel;
    num("run.dt", r.dt);
    integer("run.steps", r.steps);
    integer("run.record_every", r.record_every);
    integer("run.snapshot_every", r.snapshot_every);
    boolean("run.characteristic", r.characteristic);
    if (!(r.dt > 0)) issues.push_back("run.dt must be > 0");
    if (r.steps < 1) issues.push_back("run.steps must be >= 1");
    if (r.record_every < 1) issues.push_back("run.record_every must be >= 1");
    if (r.snapshot_every < 0) issues.push_back("run.snapshot_every must be >= 0");
    if (r.snapshot_every > 0 && r.record_every >= 1 && r.snapshot_every % r.record_every)
        issues.push_back("run.snapshot_every must be a multiple of run.record_every");

    // diagnostics
    DiagnosticsSpec& d = r.diagnostics;
    vec("diagnostics.observer", d.observer);
    vec("diagnostics.cone_x0", d.cone.x0);
    num("diagnostics.cone_c", d.cone.c);
    num("diagnostics.cone_v", d.cone.v);
    vec("diagnostics.ball_center", d.ball_center);
    num("diagnostics.ball_radius", d.ball_radius);
    num("diagnostics.ball_v_floor", d.ball_v_floor);
    boolean("diagnostics.ball_mass", d.ball_mass);
    if (!(d.cone.c > 0 && d.cone.c < 1.5707963267948966)) issues.push_back("diagnostics.cone_c must lie in (0, pi/2)");
    if (!(d.cone.v >= 0)) issues.push_back("diagnostics.cone_v must be >= 0");
    if (!(d.ball_radius > 0)) issues.push_back("diagnostics.ball_radius must be > 0");

    // frame
    FrameConfig& f = cfg.frame;
    num("frame.amplitude", f.amplitude);
    num("frame.N", f.N);
    num("frame.N_fraction", f.N_fraction);
    num("frame.T", f.T);
    integer("frame.steps", f.steps);
    num("frame.tol", f.tol);
    num("frame.D_radius", f.D_radius);
    num("frame.tail_tol", f.tail_tol);
    if (!(f.amplitude > 0)) issues.push_back("frame.amplitude must be > 0");
    if (f.N < 0) issues.push_back("frame.N must be >= 0");
    if (!(f.N_fraction > 0 && f.N_fraction < 1)) issues.push_back("frame.N_fraction must lie in (0, 1)");
    if (!(f.T > 0)) issues.push_back("frame.T must be > 0");
    if (f.steps < 1) issues.push_back("frame.steps must be >= 1");
    if (!(f.tol > 0)) issues.push_back("frame.tol must be > 0");
    if (!(f.D_radius > 0)) issues.push_back("frame.D_radius must be > 0");

    for (const auto& [k, v] : values)
        if (!used.count(k)) issues.push_back("line " + std::to_string(v.line) + ": unknown key " + k);

    if (!issues.empty()) throw ConfigError(issues);
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    ExperimentConfig cfg = parse_config_text(ss.str(), dir.empty() ? "." : dir.string());
    cfg.source = path;
    return cfg;
}

}  // namespace ksl
