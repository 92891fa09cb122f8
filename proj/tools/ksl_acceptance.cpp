#include "ksl/acceptance.hpp"
#include "ksl/simd/kernels.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
    ksl::AcceptanceOptions opts;
    app.add_option("--out", opts.out_dir, "artifact directory");
    app.add_option("--config", opts.config_path, "config exercised by the infrastructure criterion")
        ->check(CLI::ExistingFile);
    app.add_option("--only", opts.only, "criterion ids")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    std::cout << "simd backend: " << ksl::simd::active().name << std::endl;
    const auto results = ksl::run_acceptance(opts, std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 3;
}
