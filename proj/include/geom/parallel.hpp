#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace geom {

/// Worker count: GEOM_THREADS if set and positive, else the hardware count.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; the
/// caller owns making body(i) write only to slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation with a fixed reduction tree.
double pairwise_sum(std::span<const double> xs);

/// Pairwise reduction of `blocks` rows of `width` accumulators laid out
/// contiguously; returns the width-length total.
std::vector<double> pairwise_reduce(std::span<const double> rows, std::size_t width);

}  // namespace geom
