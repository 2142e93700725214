#pragma once

#include <algorithm>
#include <future>
#include <span>
#include <thread>
#include <vector>

namespace rwre {

/// fn applied to every item, results in input order. Items run concurrently in
/// batches of hardware_concurrency; fn must not share mutable state.
template <class T, class Fn>
auto parallel_map(std::span<const T> items, Fn fn) {
    using Result = decltype(fn(items[0]));
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    std::vector<Result> results;
    results.reserve(items.size());
    for (std::size_t base = 0; base < items.size(); base += width) {
        std::vector<std::future<Result>> batch;
        for (std::size_t i = base; i < std::min(items.size(), base + width); ++i)
            batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, fn, std::cref(items[i])));
        for (auto& f : batch) results.push_back(f.get());
    }
    return results;
}

} // namespace rwre
