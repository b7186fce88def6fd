#pragma once

#include <stdexcept>
#include <string>

namespace cycloid {

enum class ErrorKind {
    InvalidModel,
    BadRequest,
    GridTooCoarse,
    StepUnderflow,
    BracketFailure,
    SingularSupport,
    NotZeroDualLength,
    LadderTooShort,
    PreconditionViolated,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::BadRequest: return "BadRequest";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::SingularSupport: return "SingularSupport";
    case ErrorKind::NotZeroDualLength: return "NotZeroDualLength";
    case ErrorKind::LadderTooShort: return "LadderTooShort";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace cycloid
