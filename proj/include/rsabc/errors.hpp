#pragma once

#include <stdexcept>
#include <string>

namespace rsabc {

enum class ErrorCode {
    invalid_argument,  // bad value or dimension at an operation boundary
    config,            // config parse/validation failure
    startup,           // sampler failed to find a valid initial state
    degenerate,        // input degenerate for the requested statistic
    io,                // file read/write failure
    internal,          // broken internal invariant
};

struct Error : std::runtime_error {
    ErrorCode code;
    Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) {
    throw Error(c, msg);
}

inline void require(bool cond, ErrorCode c, const std::string& msg) {
    if (!cond) throw Error(c, msg);
}

}  // namespace rsabc
