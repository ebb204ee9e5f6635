#ifndef SDDEM_PARALLEL_HPP
#define SDDEM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace sddem {

// Runs fn(0..n_jobs-1), each job claimed atomically by one worker.  Jobs
// must write disjoint state; whoever runs a job must not matter.  The first
// exception thrown by any job is rethrown on the calling thread.
inline void parallel_jobs(long n_jobs, unsigned workers,
                          const std::function<void(long)>& fn) {
    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers == 1 || n_jobs <= 1) {
        for (long j = 0; j < n_jobs; ++j) fn(j);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            const long j = next.fetch_add(1);
            if (j >= n_jobs || failed.load()) return;
            try {
                fn(j);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(n_jobs));
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
}

} // namespace sddem

#endif
