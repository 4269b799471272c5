#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qanneal {

enum class ErrorCode {
    InvalidInput,
    Range,
    Model,
    Size,
    Domain,
    Lookup,
    Validation,
    Parse,
    Order,
    Config,
    UnsupportedDegree,
    NumericalConsistency,
    NumericalFailure,
    NonConvergence,
    Shape,
    Version,
    Io,
};

/// Stable lower-case identifier used as the machine-parsable prefix of CLI errors.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qanneal
