#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace posdecomp {

/// Pairwise (cascade) summation with a fixed split order; bitwise reproducible.
double pairwise_sum(std::span<const double> terms) noexcept;

/// Runs body(i) for i in [0, count) on up to `workers` threads. Iteration-to-thread
/// assignment does not affect results as long as body writes only to slot i.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// Worker count to use when the caller passes 0.
unsigned default_workers() noexcept;

}  // namespace posdecomp
