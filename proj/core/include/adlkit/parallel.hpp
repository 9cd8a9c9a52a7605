#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace adlkit {

// 0 means "all available cores".
inline unsigned resolve_workers(unsigned workers) noexcept
{
    if (workers != 0) {
        return workers;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

// Half-open range of trial indices handled by one batch.
struct BatchRange {
    std::size_t index;
    std::size_t begin;
    std::size_t end;
};

// Splits [0, items) into a batch layout that depends only on `items` and
// `max_batches`, never on the worker count.
inline std::vector<BatchRange> make_batches(std::size_t items, std::size_t max_batches)
{
    std::vector<BatchRange> out;
    const std::size_t n = std::max<std::size_t>(1, std::min(items, max_batches));
    for (std::size_t b = 0; b < n; ++b) {
        out.push_back({b, items * b / n, items * (b + 1) / n});
    }
    return out;
}

// Evaluates fn(batch) for every batch on up to `workers` threads and returns
// the results in batch order. Callers merge results sequentially, so the
// outcome is independent of the worker count.
template <typename Fn>
auto map_batches(const std::vector<BatchRange>& batches, unsigned workers, Fn&& fn)
{
    using Result = decltype(fn(batches.front()));
    std::vector<Result> results(batches.size());
    const unsigned threads = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(batches.size()));
    if (threads <= 1) {
        for (std::size_t b = 0; b < batches.size(); ++b) {
            results[b] = fn(batches[b]);
        }
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(batches.size());
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < batches.size(); b = next++) {
                try {
                    results[b] = fn(batches[b]);
                } catch (...) {
                    errors[b] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    // Report the failure of the lowest batch so diagnostics are reproducible.
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

} // namespace adlkit
