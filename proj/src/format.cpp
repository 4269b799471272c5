#include "qanneal/format.hpp"

#include <array>
#include <charconv>

#include "qanneal/error.hpp"

namespace qanneal {

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), end);
}

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid_input";
        case ErrorCode::Range: return "range";
        case ErrorCode::Model: return "model";
        case ErrorCode::Size: return "size";
        case ErrorCode::Domain: return "domain";
        case ErrorCode::Lookup: return "lookup";
        case ErrorCode::Validation: return "validation";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Order: return "order";
        case ErrorCode::Config: return "config";
        case ErrorCode::UnsupportedDegree: return "unsupported_degree";
        case ErrorCode::NumericalConsistency: return "numerical_consistency";
        case ErrorCode::NumericalFailure: return "numerical_failure";
        case ErrorCode::NonConvergence: return "non_convergence";
        case ErrorCode::Shape: return "shape";
        case ErrorCode::Version: return "version";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace qanneal
