#pragma once

#include "ksl/error.hpp"
#include "ksl/grid.hpp"
#include "ksl/interactions.hpp"
#include "ksl/solver.hpp"

#include <string>
#include <vector>

namespace ksl {

struct InitialSpec {
    bool from_snapshot = false;
    std::string snapshot_path;  // resolved against the config file's directory
    double amplitude = 1.0;
    double x_width = 1.0;
    double xi_width = 1.0;
};

struct FrameConfig {
    double amplitude = 1.0;
    double N = 0.0;            // 0 selects N_fraction * alpha_lower
    double N_fraction = 0.5;
    double T = 4.0;
    int steps = 8;
    double tol = 1e-8;
    double D_radius = 1.0;
    double tail_tol = 0.0;     // 0 selects 1e-3 * N
};

struct ExperimentConfig {
    GridSpec grid;
    InitialSpec initial;
    KernelSpec kernel;
    RunConfig run;
    FrameConfig frame;
    std::string source;
};

// Thrown with every problem found, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

// Sections: [grid] [initial.gaussian] | [initial.snapshot] [kernel] [run] [frame] [diagnostics].
// Values: numbers, true/false, "strings", and [number, ...] arrays. `#` starts a comment.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");

}  // namespace ksl
