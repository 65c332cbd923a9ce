#pragma once

#include <stdexcept>
#include <string>

namespace tracebench {

// Error categories; the numeric values double as C API status codes, and the
// CLI maps config/provider/parse straight to its exit codes.
enum class ErrorCode {
    generic = 1,
    config = 2,
    provider = 3,
    parse = 4,
    io = 5,
    validation = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace tracebench
