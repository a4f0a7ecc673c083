#include "collimetric/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace collimetric {

unsigned Parallelism::resolved() const {
    if (threads != 0) {
        return threads;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, Parallelism parallelism,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) {
        return;
    }
    const std::size_t workers = std::min<std::size_t>(parallelism.resolved(), count);
    if (workers <= 1) {
        body(0, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace collimetric
