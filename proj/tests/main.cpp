#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "ksl/error.hpp"

#include <string>

int main(int argc, char** argv) {
    // Small test grids trip the boundary-mass warning on purpose.
    ksl::set_warning_sink([](const std::string&, const std::string&) {});
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
