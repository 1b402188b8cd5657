#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kpa {

namespace detail {
inline std::atomic<std::size_t>& worker_override() {
    static std::atomic<std::size_t> value{0};
    return value;
}
}  // namespace detail

/// Caps the worker pool; 0 restores the default (KPA_THREADS, else hardware).
inline void set_worker_count(std::size_t workers) { detail::worker_override() = workers; }

inline std::size_t worker_count() {
    if (const auto forced = detail::worker_override().load(); forced > 0) {
        return forced;
    }
    if (const char* env = std::getenv("KPA_THREADS"); env != nullptr && *env != '\0') {
        try {
            const auto parsed = std::stoul(env);
            if (parsed > 0) {
                return parsed;
            }
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(worker, index) for every index in [0, count) with dynamic
/// scheduling. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t workers = worker_count()) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(std::size_t{0}, i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) {
                    body(w, i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace kpa
