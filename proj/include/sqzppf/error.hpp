#pragma once

#include <stdexcept>
#include <string>

namespace sqzppf {

enum class ErrorCode {
    InvalidArgument,
    UnitMismatch,
    NullInput,
    NoCorrelation,
    EmptySignal,
    GridTooNarrow,
    NotImplemented,
    Config,
    Io,
    Numerical,
};

/// Process exit status for an error code: 2 config, 3 numerical, 4 I/O.
int exit_status(ErrorCode code);
const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sqzppf
