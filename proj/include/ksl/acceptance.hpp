#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ksl {

struct AcceptanceOptions {
    std::string out_dir = "acceptance_out";  // CSV and SVG artifacts
    std::string config_path;                 // config exercised by criterion 13 (optional)
    std::vector<int> only;                   // empty = all criteria
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Runs the acceptance criteria, printing one PASS/FAIL line per criterion as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

}  // namespace ksl
