#ifndef BILLIARDS_ERROR_HPP
#define BILLIARDS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace billiards {

enum class ErrorKind {
    InvalidArgument,
    ParseError,
    NonConvergence,
    NotARoot,
    NoSignChange,
    ContainsInfinityLine,
    SingularPoint,
    DegenerateSystem,
    ScratchPoint,
    LineInCurve,
    InfinityBasePoint,
    NoRealReturn,
    GenericityFailure,
    BoundaryPoint,
    BranchLost,
    IsotropicFrame,
    BranchJump,
    MatrixMismatch,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NotARoot: return "NotARoot";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::ContainsInfinityLine: return "ContainsInfinityLine";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::ScratchPoint: return "ScratchPoint";
    case ErrorKind::LineInCurve: return "LineInCurve";
    case ErrorKind::InfinityBasePoint: return "InfinityBasePoint";
    case ErrorKind::NoRealReturn: return "NoRealReturn";
    case ErrorKind::GenericityFailure: return "GenericityFailure";
    case ErrorKind::BoundaryPoint: return "BoundaryPoint";
    case ErrorKind::BranchLost: return "BranchLost";
    case ErrorKind::IsotropicFrame: return "IsotropicFrame";
    case ErrorKind::BranchJump: return "BranchJump";
    case ErrorKind::MatrixMismatch: return "MatrixMismatch";
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

} // namespace billiards

#endif
