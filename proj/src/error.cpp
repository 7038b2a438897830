#include "sqzppf/error.hpp"

namespace sqzppf {

int exit_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::UnitMismatch:
        case ErrorCode::NotImplemented:
        case ErrorCode::Config:
            return 2;
        case ErrorCode::Io:
            return 4;
        default:
            return 3;
    }
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::UnitMismatch: return "unit mismatch";
        case ErrorCode::NullInput: return "null input";
        case ErrorCode::NoCorrelation: return "no correlation";
        case ErrorCode::EmptySignal: return "empty signal";
        case ErrorCode::GridTooNarrow: return "grid too narrow";
        case ErrorCode::NotImplemented: return "not implemented";
        case ErrorCode::Config: return "config error";
        case ErrorCode::Io: return "I/O error";
        case ErrorCode::Numerical: return "numerical failure";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace sqzppf
