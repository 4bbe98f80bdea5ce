#include "tcw/error.hpp"

namespace tcw {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotClosedUnderUnion: return "NotClosedUnderUnion";
        case ErrorKind::NotClosedUnderIntersection: return "NotClosedUnderIntersection";
        case ErrorKind::MissingEmptyOrFull: return "MissingEmptyOrFull";
        case ErrorKind::OutOfRangePoint: return "OutOfRangePoint";
        case ErrorKind::NotPreorder: return "NotPreorder";
        case ErrorKind::EmptyList: return "EmptyList";
        case ErrorKind::SizeTooLarge: return "SizeTooLarge";
        case ErrorKind::NotContinuous: return "NotContinuous";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::NoTopology: return "NoTopology";
        case ErrorKind::NoChangSystem: return "NoChangSystem";
        case ErrorKind::NotSubsetOfUnit: return "NotSubsetOfUnit";
        case ErrorKind::TooManyAtoms: return "TooManyAtoms";
        case ErrorKind::UnboundVariable: return "UnboundVariable";
        case ErrorKind::TooLargeForExhaustive: return "TooLargeForExhaustive";
        case ErrorKind::NotClosed: return "NotClosed";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::DimTooSmall: return "DimTooSmall";
        case ErrorKind::DimUnsupported: return "DimUnsupported";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::ScriptRefuted: return "ScriptRefuted";
        case ErrorKind::Parse: return "Parse";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace tcw
