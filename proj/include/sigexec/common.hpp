#pragma once

#include <stdexcept>
#include <string>

namespace sigexec {

inline constexpr const char* kVersion = "0.1.0";

// Thrown when inputs or configuration violate a documented precondition.
// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a computation fails numerically (non-finite values, failed
// factorization, residual above tolerance). CLI exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on file read/write/parse problems. CLI exit code 4.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int numeric = 3;
inline constexpr int io = 4;
}  // namespace exit_code

}  // namespace sigexec
