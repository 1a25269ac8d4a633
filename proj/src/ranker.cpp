#include "vwsd/ranker.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "vwsd/errors.hpp"

namespace vwsd {

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("cosine over different dimensions");
  const double na = l2_norm(a.values);
  const double nb = l2_norm(b.values);
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("cosine with a zero vector");
  return dot(a.values, b.values) / (na * nb);
}

RankingResult rank_candidates(const Embedding& text, std::span<const Embedding> images,
                              std::optional<int> gold_index) {
  if (images.size() != kCandidatesPerSample) {
    throw InvalidArgument("expected 10 candidate embeddings, got " + std::to_string(images.size()));
  }
  if (gold_index && (*gold_index < 0 || *gold_index >= static_cast<int>(kCandidatesPerSample))) {
    throw InvalidArgument("gold index out of range");
  }

  RankingResult result;
  for (std::size_t j = 0; j < kCandidatesPerSample; ++j) result.scores[j] = cosine(text, images[j]);
  std::iota(result.order.begin(), result.order.end(), 0);
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&](int a, int b) { return result.scores[static_cast<std::size_t>(a)] >
                                              result.scores[static_cast<std::size_t>(b)]; });
  result.predicted_index = result.order.front();
  if (gold_index) {
    const auto it = std::find(result.order.begin(), result.order.end(), *gold_index);
    result.gold_rank = static_cast<int>(it - result.order.begin()) + 1;
  }
  return result;
}

}  // namespace vwsd
