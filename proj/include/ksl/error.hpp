#pragma once

#include <stdexcept>
#include <string>

namespace ksl {

enum class ErrorKind {
    argument,
    validation,
    budget,
    unsupported,
    format_magic,
    format_version,
    truncated,
    io,
    convergence,
    runtime,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// Hook for non-fatal conditions (boundary mass, inexact shifts). Defaults to stderr.
using WarningSink = void (*)(const std::string& code, const std::string& message);
void set_warning_sink(WarningSink sink);
void warn(const std::string& code, const std::string& message);

}  // namespace ksl
