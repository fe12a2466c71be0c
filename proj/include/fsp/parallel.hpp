#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fsp {

// Runs fn(i) for i in [0, n) on up to n_threads workers. Results land in a
// caller-indexed slot, so the outcome is independent of scheduling. The first
// worker exception (by worker index) is rethrown after all workers join.
template <class Result>
std::vector<Result> parallel_map(std::size_t n, int n_threads,
                                 const std::function<Result(std::size_t)>& fn) {
    std::vector<Result> results(n);
    if (n_threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += n_workers) results[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace fsp
