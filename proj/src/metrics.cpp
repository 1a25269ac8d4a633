#include "vwsd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vwsd/dataset.hpp"
#include "vwsd/errors.hpp"

namespace vwsd {

namespace {
void check_ranks(std::span<const int> ranks) {
  if (ranks.empty()) throw InvalidArgument("metric over an empty rank list");
  for (int r : ranks) {
    if (r < 1 || r > static_cast<int>(kCandidatesPerSample)) {
      throw InvalidArgument("rank " + std::to_string(r) + " outside [1, 10]");
    }
  }
}
}  // namespace

double compute_mrr(std::span<const int> ranks) {
  check_ranks(ranks);
  double acc = 0.0;
  for (int r : ranks) acc += 1.0 / r;
  return acc / static_cast<double>(ranks.size());
}

double compute_hit_rate(std::span<const int> ranks) {
  check_ranks(ranks);
  const auto hits = std::count(ranks.begin(), ranks.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

LatencyStats summarize_latency(std::vector<double> samples_ms) {
  LatencyStats stats;
  stats.count = samples_ms.size();
  if (samples_ms.empty()) return stats;
  std::sort(samples_ms.begin(), samples_ms.end());
  const std::size_t n = samples_ms.size();
  stats.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(n);
  stats.median_ms = n % 2 == 1 ? samples_ms[n / 2] : 0.5 * (samples_ms[n / 2 - 1] + samples_ms[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n) - 1e-9));
  stats.p95_ms = samples_ms[std::max<std::size_t>(rank, 1) - 1];
  return stats;
}

}  // namespace vwsd
