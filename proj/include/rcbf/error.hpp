#pragma once

#include <stdexcept>
#include <string>

namespace rcbf {

enum class ErrorCode {
    InvalidArgument,
    NonPositiveMargin,  // available control authority does not dominate w_max + |l''|
    DegenerateBox,      // l_ub0 == l_lb0, feasibility condition undefined
    InfeasibleState,    // state outside the restricted set or empty input interval
    SingularGain,
    ConfigError,
};

inline const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveMargin: return "NonPositiveMargin";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::InfeasibleState: return "InfeasibleState";
    case ErrorCode::SingularGain: return "SingularGain";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rcbf
