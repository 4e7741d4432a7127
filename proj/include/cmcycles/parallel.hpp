#pragma once

#include <future>
#include <vector>

namespace cmc {

// Deterministic parallel map: results come back in input order regardless
// of scheduling. jobs <= 1 degrades to a plain loop.
template <class In, class F>
auto parallel_map(const std::vector<In>& items, F fn, int jobs)
    -> std::vector<decltype(fn(items[0]))> {
    using Out = decltype(fn(items[0]));
    std::vector<Out> out(items.size());
    if (jobs <= 1 || items.size() < 2) {
        for (size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
        return out;
    }
    std::vector<std::future<void>> futs;
    size_t chunk = (items.size() + (size_t)jobs - 1) / (size_t)jobs;
    for (int j = 0; j < jobs; ++j) {
        size_t lo = (size_t)j * chunk;
        if (lo >= items.size()) break;
        size_t hi = std::min(items.size(), lo + chunk);
        futs.push_back(std::async(std::launch::async, [&, lo, hi] {
            for (size_t i = lo; i < hi; ++i) out[i] = fn(items[i]);
        }));
    }
    for (auto& f : futs) f.get();
    return out;
}

}  // namespace cmc
