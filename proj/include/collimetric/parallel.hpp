#pragma once

#include <cstddef>
#include <functional>

namespace collimetric {

/// Worker count for internally parallel operations. 0 means "all cores".
struct Parallelism {
    unsigned threads = 0;

    unsigned resolved() const;
};

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunking is
/// static; callers write results into per-index slots so the outcome does not
/// depend on the worker count.
void parallel_for(std::size_t count, Parallelism parallelism,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace collimetric
