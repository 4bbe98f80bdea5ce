#pragma once

#include <stdexcept>
#include <string>

namespace tcw {

enum class ErrorKind {
    NotClosedUnderUnion,
    NotClosedUnderIntersection,
    MissingEmptyOrFull,
    OutOfRangePoint,
    NotPreorder,
    EmptyList,
    SizeTooLarge,
    NotContinuous,
    IndexOutOfRange,
    NoTopology,
    NoChangSystem,
    NotSubsetOfUnit,
    TooManyAtoms,
    UnboundVariable,
    TooLargeForExhaustive,
    NotClosed,
    TooLarge,
    DimTooSmall,
    DimUnsupported,
    BudgetExceeded,
    ScriptRefuted,
    Parse,
    InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Single exception type for every module; `kind()` tells callers which
/// contract was broken, `what()` carries the witness.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tcw
