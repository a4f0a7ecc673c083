#pragma once

#include <stdexcept>
#include <string>

namespace collimetric {

enum class ErrorKind {
    io,
    parse,
    non_finite,
    empty_cloud,
    invalid_argument,
    size_mismatch,
    over_cap,
    frame_mismatch,
    unsorted,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind()` lets callers (the CLI in
// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace collimetric
