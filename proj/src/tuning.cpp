#include "vwsd/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/hashing.hpp"

namespace vwsd {

void SearchSpace::validate() const {
  for (const ParamRange* r : {&beta_p, &beta_s, &tau}) {
    if (!std::isfinite(r->lo) || !std::isfinite(r->hi) || r->lo > r->hi) {
      throw InvalidArgument("empty or invalid search range");
    }
  }
  if (beta_p.lo < 0.0 || beta_p.hi > 1.0 || beta_s.lo < 0.0 || beta_s.hi > 1.0) {
    throw InvalidArgument("fusion weight ranges must lie inside [0, 1]");
  }
  if (!(tau.lo > 0.0)) throw InvalidArgument("tau range must be positive");
}

namespace {

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double result = 0.0;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return result;
}

double unit(SplitMix64& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

double lerp(const ParamRange& r, double u) { return r.lo + (r.hi - r.lo) * u; }

double unlerp(const ParamRange& r, double x) { return r.hi > r.lo ? (x - r.lo) / (r.hi - r.lo) : 0.5; }

TrialParams from_unit(const SearchSpace& s, const std::array<double, 3>& u) {
  return {lerp(s.beta_p, u[0]), lerp(s.beta_s, u[1]), lerp(s.tau, u[2])};
}

std::array<double, 3> to_unit(const SearchSpace& s, const TrialParams& p) {
  return {unlerp(s.beta_p, p.beta_p), unlerp(s.beta_s, p.beta_s), unlerp(s.tau, p.tau)};
}

}  // namespace

QuasiRandomSearch::QuasiRandomSearch(SearchSpace space, std::uint64_t seed) : space_(space) {
  space_.validate();
  SplitMix64 rng(seed);
  for (double& s : shift_) s = unit(rng);
}

TrialParams QuasiRandomSearch::propose(std::span<const Trial> history) {
  constexpr std::array<unsigned, 3> kBases{2, 3, 5};
  const std::size_t index = history.size() + 1;
  std::array<double, 3> u{};
  for (std::size_t d = 0; d < 3; ++d) u[d] = std::fmod(radical_inverse(index, kBases[d]) + shift_[d], 1.0);
  return from_unit(space_, u);
}

GridSearch::GridSearch(std::vector<TrialParams> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("grid search needs at least one point");
}

TrialParams GridSearch::propose(std::span<const Trial> history) { return points_[history.size() % points_.size()]; }

ModelBasedSearch::ModelBasedSearch(SearchSpace space, std::uint64_t seed, std::size_t startup, std::size_t candidates)
    : space_(space), warmup_(space, seed), state_(seed ^ 0x5bd1e995ULL), startup_(startup), candidates_(candidates) {
  if (candidates_ == 0) throw InvalidArgument("model-based search needs at least one candidate per step");
}

TrialParams ModelBasedSearch::propose(std::span<const Trial> history) {
  std::vector<const Trial*> done;
  for (const Trial& t : history) {
    if (t.mrr) done.push_back(&t);
  }
  if (done.size() < std::max<std::size_t>(startup_, 2)) return warmup_.propose(history);

  std::stable_sort(done.begin(), done.end(), [](const Trial* a, const Trial* b) { return *a->mrr > *b->mrr; });
  const std::size_t n_good = std::max<std::size_t>(1, (done.size() + 3) / 4);
  std::vector<std::array<double, 3>> good;
  std::vector<std::array<double, 3>> bad;
  for (std::size_t i = 0; i < done.size(); ++i) (i < n_good ? good : bad).push_back(to_unit(space_, done[i]->params));

  constexpr double kBandwidth = 0.15;
  const auto density = [&](const std::vector<std::array<double, 3>>& pts, const std::array<double, 3>& x) {
    double acc = 0.0;
    for (const auto& p : pts) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < 3; ++d) d2 += (x[d] - p[d]) * (x[d] - p[d]);
      acc += std::exp(-0.5 * d2 / (kBandwidth * kBandwidth));
    }
    // Uniform floor keeps the ratio finite away from every observation.
    return acc / static_cast<double>(std::max<std::size_t>(pts.size(), 1)) + 1e-3;
  };

  SplitMix64 rng(state_ + history.size());
  std::array<double, 3> best{};
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates_; ++c) {
    const auto& centre = good[static_cast<std::size_t>(unit(rng) * static_cast<double>(good.size())) % good.size()];
    std::array<double, 3> x{};
    for (std::size_t d = 0; d < 3; ++d) {
      // Box-Muller
      const double u1 = std::max(unit(rng), 1e-300);
      const double u2 = unit(rng);
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      x[d] = std::clamp(centre[d] + kBandwidth * z, 0.0, 1.0);
    }
    const double score = std::log(density(good, x)) - std::log(density(bad, x));
    if (score > best_score) {
      best_score = score;
      best = x;
    }
  }
  return from_unit(space_, best);
}

PipelineConfig apply_params(PipelineConfig config, const TrialParams& params) {
  config.weights = FusionWeights{params.beta_p, params.beta_s};
  config.tau = params.tau;
  return config;
}

TuningObjective evaluation_objective(const EmbeddingBackend& backend, const PipelineResources& resources) {
  return [&backend, resources](const PipelineConfig& config, const SampleSet& validation) {
    PipelineConfig quiet = config;
    quiet.timing = false;
    const EvalReport report = evaluate(validation, quiet, backend, resources, "validation");
    if (!report.mrr) throw InvalidArgument("validation samples carry no gold labels");
    return std::make_pair(*report.mrr, *report.hit_rate);
  };
}

TuningResult tune_hyperparameters(const SampleSet& train, const PipelineConfig& base, SearchStrategy& strategy,
                                  std::size_t trials, const TuningObjective& objective, double fraction,
                                  std::uint64_t split_seed) {
  if (trials < 1) throw InvalidArgument("tuning needs at least one trial");
  auto [fit, validation] = split_train_validation(train, fraction, split_seed);
  if (validation.empty()) throw InvalidArgument("validation split is empty; use more samples or a smaller fraction");

  TuningResult result;
  result.train_size = fit.size();
  result.validation_size = validation.size();
  for (std::size_t n = 0; n < trials; ++n) {
    Trial trial;
    trial.number = n;
    trial.params = strategy.propose(result.trials);
    try {
      const auto [mrr, hit] = objective(apply_params(base, trial.params), validation);
      trial.mrr = mrr;
      trial.hit_rate = hit;
    } catch (const Error& e) {
      trial.error = e.what();
      spdlog::warn("trial {} failed: {}", n, e.what());
    }
    spdlog::info("trial {}: beta_p={:.4f} beta_s={:.4f} tau={:.4f} mrr={}", n, trial.params.beta_p,
                 trial.params.beta_s, trial.params.tau, trial.mrr ? std::to_string(*trial.mrr) : "failed");
    if (trial.mrr && (!result.best_trial || *trial.mrr > *result.best_trial->mrr)) result.best_trial = trial;
    result.trials.push_back(std::move(trial));
  }
  result.best = result.best_trial ? apply_params(base, result.best_trial->params) : base;
  return result;
}

nlohmann::json to_json(const Trial& t) {
  return {{"number", t.number},
          {"beta_p", t.params.beta_p},
          {"beta_s", t.params.beta_s},
          {"tau", t.params.tau},
          {"mrr", t.mrr ? nlohmann::json(*t.mrr) : nlohmann::json(nullptr)},
          {"hit_rate", t.hit_rate ? nlohmann::json(*t.hit_rate) : nlohmann::json(nullptr)},
          {"error", t.error}};
}

}  // namespace vwsd
