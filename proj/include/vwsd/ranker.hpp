#pragma once

#include <array>
#include <optional>
#include <span>

#include "vwsd/dataset.hpp"
#include "vwsd/embedding.hpp"

namespace vwsd {

/// a·b / (‖a‖‖b‖). Throws InvalidArgument on a dimension mismatch or a zero vector.
double cosine(const Embedding& a, const Embedding& b);

struct RankingResult {
  std::array<double, kCandidatesPerSample> scores{};
  /// Candidate indices by descending score; ties keep the lower index first.
  std::array<int, kCandidatesPerSample> order{};
  int predicted_index = 0;
  /// 1-based position of the gold candidate in `order`.
  std::optional<int> gold_rank;

  bool operator==(const RankingResult&) const = default;
};

/// Scores every candidate against the text embedding and sorts them.
/// Throws InvalidArgument unless exactly ten image embeddings are given.
RankingResult rank_candidates(const Embedding& text, std::span<const Embedding> images,
                              std::optional<int> gold_index = std::nullopt);

}  // namespace vwsd
