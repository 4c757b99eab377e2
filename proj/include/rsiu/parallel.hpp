#pragma once
// Work-stealing map over replication indices. Workers pull indices from an
// atomic counter; results land in a pre-sized vector slot per index, so the
// aggregate is independent of scheduling.

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rsiu {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

template <typename Result, typename Fn>
std::vector<Result> parallel_map(int count, int workers, Fn&& fn) {
    std::vector<Result> results(count);
    workers = std::min(resolve_workers(workers), std::max(count, 1));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

} // namespace rsiu
