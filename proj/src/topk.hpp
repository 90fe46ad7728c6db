#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "analogy/search.hpp"

namespace analogy::detail {

// Keeps the k entries that rank first under ranks_before. The heap front is
// the current k-th entry, so admission and the pruning threshold are O(1).
template <class Entry>
class BoundedBest {
public:
    explicit BoundedBest(std::size_t k) : k_(k) { heap_.reserve(k); }

    bool full() const noexcept { return heap_.size() >= k_; }

    // Degree an entry must reach to have a chance of admission.
    double threshold() const noexcept { return full() ? heap_.front().degree : -std::numeric_limits<double>::infinity(); }

    void offer(const Entry& e) {
        if (heap_.size() < k_) {
            heap_.push_back(e);
            std::push_heap(heap_.begin(), heap_.end(), cmp);
        } else if (ranks_before(e, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), cmp);
            heap_.back() = e;
            std::push_heap(heap_.begin(), heap_.end(), cmp);
        }
    }

    std::vector<Entry>& entries() noexcept { return heap_; }

    std::vector<Entry> sorted() && {
        std::sort(heap_.begin(), heap_.end(), cmp);
        return std::move(heap_);
    }

private:
    static bool cmp(const Entry& x, const Entry& y) noexcept { return ranks_before(x, y); }

    std::size_t k_;
    std::vector<Entry> heap_;
};

// Merges per-worker candidate lists into the canonical top k.
template <class Entry>
std::vector<Entry> merge_best(std::vector<Entry> all, std::size_t k) {
    std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return ranks_before(x, y); });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace analogy::detail
