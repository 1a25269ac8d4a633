#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vwsd {

/// Mean of 1/rank. Throws InvalidArgument on an empty list or a rank outside [1, 10].
double compute_mrr(std::span<const int> ranks);

/// Fraction of ranks equal to 1. Same preconditions as compute_mrr.
double compute_hit_rate(std::span<const int> ranks);

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  /// Nearest-rank 95th percentile.
  double p95_ms = 0.0;
};

LatencyStats summarize_latency(std::vector<double> samples_ms);

}  // namespace vwsd
