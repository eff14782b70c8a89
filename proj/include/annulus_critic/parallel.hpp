#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace annulus_critic {

/// Worker count: hardware concurrency, capped by ANNULUS_CRITIC_THREADS when set.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ANNULUS_CRITIC_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
            // Unparseable values leave the default in place.
        }
    }
    return n;
}

/// Runs body(i) for i in [0, count) on up to worker_count() threads. The
/// exception of the lowest failing index is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), count);
    std::vector<std::exception_ptr> errors(count);
    auto run = [&](std::size_t first) {
        for (std::size_t i = first; i < count; i += std::max<std::size_t>(workers, 1)) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace annulus_critic
