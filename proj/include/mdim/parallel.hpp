#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mdim {

// Splits [0, n) into contiguous chunks, one per worker. The body receives
// (begin, end, worker_index); callers write results into per-index slots so
// the outcome never depends on the worker count.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body body) {
    if (workers <= 1 || n < 2) {
        body(std::size_t{0}, n, 0u);
        return;
    }
    unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    std::size_t chunk = (n + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
        std::size_t b = t * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e, t] {
            try {
                body(b, e, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace mdim
