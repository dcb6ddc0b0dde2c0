#include "thermovis/core/error.hpp"

namespace thermovis {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::format_error: return "format_error";
        case ErrorCode::io_error: return "io_error";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::singular_configuration: return "singular_configuration";
        case ErrorCode::shape_mismatch: return "shape_mismatch";
        case ErrorCode::fingerprint_mismatch: return "fingerprint_mismatch";
        case ErrorCode::non_finite: return "non_finite";
        case ErrorCode::config_error: return "config_error";
    }
    return "unknown";
}

}  // namespace thermovis
