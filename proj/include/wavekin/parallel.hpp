#pragma once

#include <cstddef>
#include <functional>

namespace wavekin {

/// Worker count used by data-parallel loops; 0 selects hardware concurrency.
void set_thread_count(unsigned count) noexcept;
unsigned thread_count() noexcept;

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend on the worker count, so bodies must write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed-shape pairwise sum of term(i) for i in [0, n); the result depends
/// only on n and the terms, never on scheduling.
namespace detail {
template <class Term>
double tree_sum_range(std::size_t begin, std::size_t end, Term& term)
{
    if (end - begin <= 8) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return tree_sum_range(begin, mid, term) + tree_sum_range(mid, end, term);
}
}  // namespace detail

template <class Term>
double tree_sum(std::size_t n, Term&& term)
{
    return detail::tree_sum_range(0, n, term);
}

}  // namespace wavekin
