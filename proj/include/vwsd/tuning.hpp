#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vwsd/pipeline.hpp"

namespace vwsd {

struct ParamRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// Search box over the dual-channel weights and the temperature.
struct SearchSpace {
  ParamRange beta_p{0.0, 1.0};
  ParamRange beta_s{0.0, 1.0};
  ParamRange tau{0.1, 1.0};

  /// Throws InvalidArgument when any range is inverted or not finite.
  void validate() const;
};

struct TrialParams {
  double beta_p = 0.5;
  double beta_s = 0.5;
  double tau = 1.0;

  bool operator==(const TrialParams&) const = default;
};

struct Trial {
  std::size_t number = 0;
  TrialParams params;
  /// Validation MRR; absent when the trial failed.
  std::optional<double> mrr;
  std::optional<double> hit_rate;
  std::string error;
};

class SearchStrategy {
 public:
  virtual ~SearchStrategy() = default;
  virtual std::string name() const = 0;
  virtual TrialParams propose(std::span<const Trial> history) = 0;
};

/// Halton sequence (bases 2, 3, 5) with a seed-derived random shift. Deterministic under the seed.
class QuasiRandomSearch final : public SearchStrategy {
 public:
  QuasiRandomSearch(SearchSpace space, std::uint64_t seed);
  std::string name() const override { return "quasi-random"; }
  TrialParams propose(std::span<const Trial> history) override;

 private:
  SearchSpace space_;
  std::array<double, 3> shift_{};
};

/// Cycles through a fixed list of points. Throws InvalidArgument on an empty list.
class GridSearch final : public SearchStrategy {
 public:
  explicit GridSearch(std::vector<TrialParams> points);
  std::string name() const override { return "grid"; }
  TrialParams propose(std::span<const Trial> history) override;

 private:
  std::vector<TrialParams> points_;
};

/// Sequential model-based search in the style of a tree-structured Parzen estimator: after
/// `startup` quasi-random trials, candidates are drawn around the best quartile of past trials
/// and the one maximising the good/bad kernel-density ratio is proposed.
class ModelBasedSearch final : public SearchStrategy {
 public:
  ModelBasedSearch(SearchSpace space, std::uint64_t seed, std::size_t startup = 5, std::size_t candidates = 24);
  std::string name() const override { return "model-based"; }
  TrialParams propose(std::span<const Trial> history) override;

 private:
  SearchSpace space_;
  QuasiRandomSearch warmup_;
  std::uint64_t state_;
  std::size_t startup_;
  std::size_t candidates_;
};

struct TuningResult {
  PipelineConfig best;
  std::optional<Trial> best_trial;
  std::vector<Trial> trials;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
};

/// Scores one candidate configuration on the validation samples; returns (MRR, hit rate).
using TuningObjective = std::function<std::pair<double, double>(const PipelineConfig&, const SampleSet&)>;

/// Splits `train` (fraction / remainder), proposes `trials` points with `strategy`, scores each on the
/// validation part and returns the configuration with the highest validation MRR (first wins ties).
TuningResult tune_hyperparameters(const SampleSet& train, const PipelineConfig& base, SearchStrategy& strategy,
                                  std::size_t trials, const TuningObjective& objective, double fraction = 0.8,
                                  std::uint64_t split_seed = 0);

/// Objective evaluating the full pipeline with `backend`.
TuningObjective evaluation_objective(const EmbeddingBackend& backend, const PipelineResources& resources = {});

PipelineConfig apply_params(PipelineConfig config, const TrialParams& params);

nlohmann::json to_json(const Trial& trial);

}  // namespace vwsd
