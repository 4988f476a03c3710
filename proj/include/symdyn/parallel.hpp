#ifndef SYMDYN_PARALLEL_HPP
#define SYMDYN_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace symdyn {

/**
 * Runs fn(i) for i in [0, n) on up to n_jobs worker threads.
 *
 * Tasks pull indices from a shared counter, so the schedule is dynamic, but
 * each task must write only to its own output slot; results are then
 * identical for any job count. The first exception thrown by a task is
 * rethrown on the calling thread after all workers join.
 */
template <typename Fn>
void parallel_for(std::size_t n, unsigned n_jobs, Fn&& fn) {
    if (n == 0) return;
    if (n_jobs == 0) n_jobs = 1;
    if (n_jobs == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(n_jobs, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace symdyn

#endif  // SYMDYN_PARALLEL_HPP
