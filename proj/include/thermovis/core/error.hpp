#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermovis {

enum class ErrorCode {
    invalid_argument,
    parse_error,
    format_error,
    io_error,
    not_found,
    singular_configuration,
    shape_mismatch,
    fingerprint_mismatch,
    non_finite,
    config_error,
};

std::string_view to_string(ErrorCode code);

/// Single exception type used across the project; `code()` is what callers
/// branch on and what the CLI prints in its machine-readable summary.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace thermovis
