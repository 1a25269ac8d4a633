#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vwsd/augmentation.hpp"
#include "vwsd/backend.hpp"
#include "vwsd/dataset.hpp"
#include "vwsd/lexicon.hpp"
#include "vwsd/metrics.hpp"
#include "vwsd/prompts.hpp"
#include "vwsd/ranker.hpp"

namespace vwsd {

/// How the raw context phrase is embedded when no prompt channel is active.
enum class ContextPooling {
  kSentence,  ///< whole-text embedding of the phrase
  kTarget,    ///< mean of the target word's token hidden states
};

struct PipelineConfig {
  /// Text channels. `context` is the plain phrase (the vanilla pipeline) and cannot be combined
  /// with the prompt channels; semantic and photo are fused with `weights` when both are on.
  bool context_channel = true;
  bool semantic_channel = false;
  bool photo_channel = false;
  ContextPooling pooling = ContextPooling::kSentence;
  FusionWeights weights{0.5, 0.5};
  PromptTemplates templates;
  /// Adds synonym photo prompts (needs a lexical resource).
  bool synonym_prompts = false;

  /// nullopt means single-view: each candidate is encoded once, unaugmented.
  std::optional<AugmentationProfile> augmentation;
  double tau = 1.0;

  bool definitions = false;
  double alpha = 0.15;
  bool include_synonym_definitions = false;
  std::size_t synonym_count = 2;

  bool translation = false;
  std::vector<std::string> languages;

  std::uint64_t seed = 0;
  /// Samples evaluated concurrently.
  int workers = 1;
  /// Latency instrumentation; reports are byte-reproducible only with timing off.
  bool timing = true;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;

  /// Profile actually used for candidates, emitted at `resolution`.
  AugmentationProfile effective_profile(int resolution) const;
};

nlohmann::json to_json(const PipelineConfig& config);

/// External resources some stages need. Null pointers disable the dependent stages' lookups.
struct PipelineResources {
  const LexicalResource* lexicon = nullptr;
  const Translator* translator = nullptr;
};

/// Text side of one query, with the intermediate artefacts kept for inspection.
struct TextEncoding {
  Embedding embedding;
  std::optional<PromptBundle> prompts;
  std::optional<SynonymPair> synonyms;
  std::optional<std::size_t> definition_index;
  std::optional<std::string> definition;
};

TextEncoding encode_query_text(std::string_view target, std::string_view phrase, const PipelineConfig& config,
                               const EmbeddingBackend& backend, const PipelineResources& resources = {});

/// Views of one candidate per the config's profile, aggregated into one embedding.
Embedding encode_candidate(const Image& image, std::string_view image_key, const PipelineConfig& config,
                           const EmbeddingBackend& backend);

/// Loads the candidates of a sample and ranks them. Throws ImageError for an unusable candidate.
RankingResult predict_sample(const Sample& sample, const SampleSet& set, const PipelineConfig& config,
                             const EmbeddingBackend& backend, const PipelineResources& resources = {});

struct SampleOutcome {
  std::string id;
  std::optional<int> gold_rank;
  int predicted_index = 0;
  std::array<double, kCandidatesPerSample> scores{};
};

struct SkippedSample {
  std::string id;
  std::string reason;
};

struct LatencyReport {
  LatencyStats text_embedding;
  LatencyStats image_embedding_per_image;
  /// kCandidatesPerSample × mean per-image latency.
  double image_embedding_per_query_estimate_ms = 0.0;
  LatencyStats end_to_end_per_query;
};

struct EvalReport {
  std::string name;
  nlohmann::json config;
  std::vector<SampleOutcome> per_sample;
  /// Over samples with a known gold index; absent when there are none.
  std::optional<double> mrr;
  std::optional<double> hit_rate;
  std::vector<SkippedSample> skipped;
  std::optional<LatencyReport> latency;
};

/// Fraction of failed samples above which evaluate aborts.
inline constexpr double kMaxFailureFraction = 0.10;

/// Runs the configured pipeline over every sample. Samples whose images cannot be used are skipped and
/// reported; more than 10% skipped raises EvaluationAborted.
EvalReport evaluate(const SampleSet& set, const PipelineConfig& config, const EmbeddingBackend& backend,
                    const PipelineResources& resources = {}, std::string name = "evaluate");

nlohmann::json to_json(const EvalReport& report);

/// Scores rounded to 6 decimals, as written to reports.
double round6(double x);

using NamedConfig = std::pair<std::string, PipelineConfig>;

/// Evaluates each named config on the same samples.
std::vector<EvalReport> run_ablation(const SampleSet& set, const std::vector<NamedConfig>& configs,
                                     const EmbeddingBackend& backend, const PipelineResources& resources = {});

/// One row per report: name, evaluated, skipped, MRR, hit rate, mean latencies.
std::string comparison_tsv(const std::vector<EvalReport>& reports);
std::string comparison_text(const std::vector<EvalReport>& reports);

}  // namespace vwsd
