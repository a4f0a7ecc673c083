#include "collimetric/error.hpp"

namespace collimetric {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return "io-error";
    case ErrorKind::parse: return "parse-error";
    case ErrorKind::non_finite: return "non-finite-coordinate";
    case ErrorKind::empty_cloud: return "empty-cloud";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::size_mismatch: return "size-mismatch";
    case ErrorKind::over_cap: return "over-cap";
    case ErrorKind::frame_mismatch: return "frame-mismatch";
    case ErrorKind::unsorted: return "unsorted-input";
    }
    return "unknown";
}

} // namespace collimetric
