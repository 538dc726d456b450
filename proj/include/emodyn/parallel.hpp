#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace emodyn {

/// Worker count for parallel sections: EMODYN_WORKERS if set, otherwise the
/// available hardware parallelism.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("EMODYN_WORKERS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<std::size_t>(parsed);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

/// Runs fn(i) for i in [0, n) on a static block partition. Results must be
/// written to index-addressed slots so aggregation order never depends on
/// scheduling. If several tasks throw, the lowest-index exception wins.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t workers = 0) {
    if (workers == 0) workers = worker_count();
    if (workers > n) workers = n;
    if (n == 0) return;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    struct Failure {
        std::size_t index;
        std::exception_ptr error;
    };
    std::vector<Failure> failures(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);

    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    failures[w] = Failure{i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    const Failure* first = nullptr;
    for (const auto& f : failures) {
        if (f.error && (!first || f.index < first->index)) first = &f;
    }
    if (first) std::rethrow_exception(first->error);
}

}  // namespace emodyn
