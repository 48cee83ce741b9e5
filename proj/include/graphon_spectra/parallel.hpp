#pragma once

// Minimal fork-join helpers. The worker count is capped by the environment
// variable GRAPHON_SPECTRA_THREADS when set.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace graphon_spectra {

inline std::size_t thread_budget() {
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GRAPHON_SPECTRA_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) hw = std::min(hw, static_cast<std::size_t>(cap));
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return hw;
}

/// Calls body(i) for i in [0, count) on up to thread_budget() workers, with
/// dynamic scheduling. The first exception thrown by any call is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t max_workers = 0) {
    std::size_t workers = std::min(count, max_workers == 0 ? thread_budget() : max_workers);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace graphon_spectra
