#ifndef CAULK_PARALLEL_HPP
#define CAULK_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace caulk {

/// Worker cap: CAULK_THREADS if set, else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("CAULK_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? int(hw) : 1;
}

/// Runs fn(0..count-1) across a stateless worker pool. Each index is an
/// independent job; callers must write results into per-index slots so the
/// outcome is independent of scheduling.
template <typename F>
void parallel_for(std::size_t count, F&& fn) {
    std::size_t workers = std::min<std::size_t>(std::size_t(worker_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace caulk

#endif  // CAULK_PARALLEL_HPP
