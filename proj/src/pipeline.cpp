#include "vwsd/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

void PipelineConfig::validate() const {
  if (!context_channel && !semantic_channel && !photo_channel) {
    throw ConfigError("at least one text channel must be enabled");
  }
  if (context_channel && (semantic_channel || photo_channel)) {
    throw ConfigError("the context channel cannot be combined with prompt channels");
  }
  try {
    weights.validate();
    if (augmentation) augmentation->validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (semantic_channel && templates.semantic.empty()) throw ConfigError("no semantic templates");
  if (photo_channel && templates.photo.empty()) throw ConfigError("no photo templates");
  if (workers < 1) throw ConfigError("workers must be at least 1");
}

AugmentationProfile PipelineConfig::effective_profile(int resolution) const {
  AugmentationProfile profile = augmentation.value_or(AugmentationProfile::single_view(resolution));
  profile.output_size = resolution;
  profile.seed = seed;
  return profile;
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j;
  std::vector<std::string> channels;
  if (c.context_channel) channels.emplace_back("context");
  if (c.semantic_channel) channels.emplace_back("semantic");
  if (c.photo_channel) channels.emplace_back("photo");
  j["channels"] = channels;
  j["contextual_pooling"] = c.pooling == ContextPooling::kTarget ? "target" : "sentence";
  j["beta_p"] = c.weights.beta_p;
  j["beta_s"] = c.weights.beta_s;
  j["templates"] = {{"semantic", c.templates.semantic},
                    {"photo", c.templates.photo},
                    {"synonym_photo", c.templates.synonym_photo}};
  j["synonym_prompts"] = c.synonym_prompts;
  if (c.augmentation) {
    nlohmann::json counts = nlohmann::json::object();
    for (Strategy s : kStrategyOrder) counts[std::string(to_string(s))] = c.augmentation->count(s);
    const AugmentationProfile& p = *c.augmentation;
    j["augmentation"] = {{"strategy_counts", counts},
                         {"total_views", p.total_views()},
                         {"rotation_range_degrees", {p.rotation_min_degrees, p.rotation_max_degrees}},
                         {"brightness", p.brightness},
                         {"contrast", p.contrast},
                         {"saturation", p.saturation},
                         {"blur_radius", p.blur_radius},
                         {"center_crop", p.center_crop_fraction},
                         {"zoom", p.zoom_fraction},
                         {"slight_crop_min", p.slight_crop_min}};
  } else {
    j["augmentation"] = "single-view";
  }
  j["tau"] = c.tau;
  j["definitions"] = {{"enabled", c.definitions},
                      {"alpha", c.alpha},
                      {"include_synonyms", c.include_synonym_definitions},
                      {"synonym_count", c.synonym_count}};
  j["translation"] = {{"enabled", c.translation}, {"languages", c.languages}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["timing"] = c.timing;
  return j;
}

namespace {

Embedding embed_channel(std::span<const std::string> prompts, const PipelineConfig& config,
                        const EmbeddingBackend& backend, const PipelineResources& resources) {
  if (config.translation && resources.translator != nullptr && !config.languages.empty()) {
    return multilingual_channel_embedding(prompts, config.languages, *resources.translator, backend);
  }
  return channel_embedding(prompts, backend);
}

std::optional<SynonymPair> find_synonyms(std::string_view target, std::string_view context,
                                         const LexicalResource& lexicon) {
  const auto t_syn = lookup_synonym(lexicon, target);
  const auto c_syn = lookup_synonym(lexicon, context);
  if (!t_syn && !c_syn) return std::nullopt;
  return SynonymPair{t_syn.value_or(std::string(target)), c_syn.value_or(std::string(context))};
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

TextEncoding encode_query_text(std::string_view target, std::string_view phrase, const PipelineConfig& config,
                               const EmbeddingBackend& backend, const PipelineResources& resources) {
  TextEncoding out;
  if (config.context_channel) {
    bool pooled = false;
    if (config.pooling == ContextPooling::kTarget) {
      if (backend.supports_token_states()) {
        try {
          out.embedding = backend.encode_text_target(phrase, find_target_span(backend, phrase, target));
          pooled = true;
        } catch (const InvalidArgument& e) {
          spdlog::warn("target pooling unavailable for '{}': {}; using the whole phrase", phrase, e.what());
        }
      } else {
        spdlog::warn("backend '{}' has no token hidden states; using the whole phrase", backend.descriptor().name);
      }
    }
    if (!pooled) {
      const std::string p(phrase);
      out.embedding = embed_channel(std::span<const std::string>(&p, 1), config, backend, resources);
    }
  } else {
    const std::string context = context_without_target(phrase, target);
    if (config.synonym_prompts && resources.lexicon != nullptr) {
      out.synonyms = find_synonyms(target, context, *resources.lexicon);
    }
    PromptBundle bundle = build_prompt_bundle(target, context, out.synonyms, config.templates);
    std::optional<Embedding> h_s;
    std::optional<Embedding> h_p;
    if (config.semantic_channel) h_s = embed_channel(bundle.semantic_prompts, config, backend, resources);
    if (config.photo_channel) h_p = embed_channel(bundle.photo_channel(), config, backend, resources);
    if (h_s && h_p) {
      out.embedding = fuse_channels(*h_p, *h_s, config.weights);
    } else {
      out.embedding = h_p ? *h_p : *h_s;
    }
    out.prompts = std::move(bundle);
  }

  if (config.definitions && resources.lexicon != nullptr) {
    const auto definitions =
        candidate_definitions(*resources.lexicon, target, config.include_synonym_definitions, config.synonym_count);
    if (definitions.empty()) {
      spdlog::debug("no definitions for '{}'; keeping the contextual embedding", target);
    } else {
      const DefinitionChoice choice = select_definition(out.embedding, definitions, backend);
      out.embedding = blend_definition(choice.embedding, out.embedding, config.alpha);
      out.definition_index = choice.index;
      out.definition = definitions[choice.index];
    }
  }
  return out;
}

Embedding encode_candidate(const Image& image, std::string_view image_key, const PipelineConfig& config,
                           const EmbeddingBackend& backend) {
  const AugmentationProfile profile = config.effective_profile(backend.descriptor().image_resolution);
  const ViewSet views = generate_views(image, profile, image_key);
  return aggregate_image_embedding(views, backend, config.tau);
}

namespace {

struct SampleRun {
  std::optional<SampleOutcome> outcome;
  std::optional<SkippedSample> skipped;
  double text_ms = 0.0;
  std::vector<double> image_ms;
  double total_ms = 0.0;
};

SampleRun run_sample(const Sample& sample, const SampleSet& set, const PipelineConfig& config,
                     const EmbeddingBackend& backend, const PipelineResources& resources) {
  SampleRun run;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::array<Image, kCandidatesPerSample> images;
    for (std::size_t j = 0; j < kCandidatesPerSample; ++j) {
      images[j] = load_image(set.resolve(sample.candidates[j]));
    }

    const auto text_start = std::chrono::steady_clock::now();
    const Embedding text = encode_query_text(sample.target_word, sample.context_phrase, config, backend, resources).embedding;
    run.text_ms = elapsed_ms(text_start);

    std::vector<Embedding> candidates;
    candidates.reserve(kCandidatesPerSample);
    for (std::size_t j = 0; j < kCandidatesPerSample; ++j) {
      const auto image_start = std::chrono::steady_clock::now();
      candidates.push_back(encode_candidate(images[j], sample.candidates[j], config, backend));
      run.image_ms.push_back(elapsed_ms(image_start));
    }

    const RankingResult ranking = rank_candidates(text, candidates, sample.gold_index);
    run.outcome = SampleOutcome{sample.id, ranking.gold_rank, ranking.predicted_index, ranking.scores};
  } catch (const ImageError& e) {
    run.skipped = SkippedSample{sample.id, e.what()};
  }
  run.total_ms = elapsed_ms(start);
  return run;
}

}  // namespace

EvalReport evaluate(const SampleSet& set, const PipelineConfig& config, const EmbeddingBackend& backend,
                    const PipelineResources& resources, std::string name) {
  config.validate();
  std::vector<SampleRun> runs(set.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < set.size(); i = next++) {
      try {
        runs[i] = run_sample(set.samples[i], set, config, backend, resources);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = set.size();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(set.size(), 1))));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  EvalReport report;
  report.name = std::move(name);
  report.config = to_json(config);
  report.config["backend"] = {{"name", backend.descriptor().name},
                              {"embedding_dim", backend.descriptor().embedding_dim},
                              {"text_context_limit", backend.descriptor().text_context_limit},
                              {"image_resolution", backend.descriptor().image_resolution}};
  if (resources.lexicon != nullptr) report.config["lexicon"] = resources.lexicon->version();
  report.config["split"] = std::string(to_string(set.split));
  report.config["samples"] = set.size();

  std::vector<int> ranks;
  std::vector<double> text_ms;
  std::vector<double> image_ms;
  std::vector<double> total_ms;
  for (SampleRun& run : runs) {
    if (run.skipped) {
      report.skipped.push_back(std::move(*run.skipped));
      continue;
    }
    if (run.outcome->gold_rank) ranks.push_back(*run.outcome->gold_rank);
    report.per_sample.push_back(std::move(*run.outcome));
    text_ms.push_back(run.text_ms);
    image_ms.insert(image_ms.end(), run.image_ms.begin(), run.image_ms.end());
    total_ms.push_back(run.total_ms);
  }

  if (!set.empty() &&
      static_cast<double>(report.skipped.size()) > kMaxFailureFraction * static_cast<double>(set.size())) {
    throw EvaluationAborted(fmt::format("{} of {} samples failed (first: {})", report.skipped.size(), set.size(),
                                        report.skipped.front().reason));
  }
  for (const SkippedSample& s : report.skipped) spdlog::warn("skipped sample {}: {}", s.id, s.reason);

  if (!ranks.empty()) {
    report.mrr = compute_mrr(ranks);
    report.hit_rate = compute_hit_rate(ranks);
  }
  if (config.timing) {
    LatencyReport latency;
    latency.text_embedding = summarize_latency(std::move(text_ms));
    latency.image_embedding_per_image = summarize_latency(std::move(image_ms));
    latency.image_embedding_per_query_estimate_ms =
        static_cast<double>(kCandidatesPerSample) * latency.image_embedding_per_image.mean_ms;
    latency.end_to_end_per_query = summarize_latency(std::move(total_ms));
    report.latency = latency;
  }
  return report;
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

namespace {
nlohmann::json to_json(const LatencyStats& s) {
  return {{"count", s.count}, {"mean", s.mean_ms}, {"median", s.median_ms}, {"p95", s.p95_ms}};
}
}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["config"] = report.config;
  j["aggregates"] = {{"mrr", report.mrr ? nlohmann::json(*report.mrr) : nlohmann::json(nullptr)},
                     {"hit_rate", report.hit_rate ? nlohmann::json(*report.hit_rate) : nlohmann::json(nullptr)},
                     {"evaluated", report.per_sample.size()},
                     {"skipped", report.skipped.size()}};
  if (report.latency) {
    const LatencyReport& l = *report.latency;
    j["latency"] = {{"unit", "ms"},
                    {"text_embedding", to_json(l.text_embedding)},
                    {"image_embedding_per_image", to_json(l.image_embedding_per_image)},
                    {"image_embedding_per_query_estimate", l.image_embedding_per_query_estimate_ms},
                    {"end_to_end_per_query", to_json(l.end_to_end_per_query)}};
  } else {
    j["latency"] = nullptr;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const SampleOutcome& s : report.per_sample) {
    nlohmann::json scores = nlohmann::json::array();
    for (double x : s.scores) scores.push_back(round6(x));
    rows.push_back({{"id", s.id},
                    {"gold_rank", s.gold_rank ? nlohmann::json(*s.gold_rank) : nlohmann::json(nullptr)},
                    {"predicted_index", s.predicted_index},
                    {"scores", scores}});
  }
  j["per_sample"] = rows;
  nlohmann::json skipped = nlohmann::json::array();
  for (const SkippedSample& s : report.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
  j["skipped"] = skipped;
  return j;
}

RankingResult predict_sample(const Sample& sample, const SampleSet& set, const PipelineConfig& config,
                             const EmbeddingBackend& backend, const PipelineResources& resources) {
  config.validate();
  const Embedding text = encode_query_text(sample.target_word, sample.context_phrase, config, backend, resources).embedding;
  std::vector<Embedding> candidates;
  for (const std::string& ref : sample.candidates) {
    candidates.push_back(encode_candidate(load_image(set.resolve(ref)), ref, config, backend));
  }
  return rank_candidates(text, candidates, sample.gold_index);
}

std::vector<EvalReport> run_ablation(const SampleSet& set, const std::vector<NamedConfig>& configs,
                                     const EmbeddingBackend& backend, const PipelineResources& resources) {
  std::vector<EvalReport> reports;
  reports.reserve(configs.size());
  for (const auto& [name, config] : configs) {
    spdlog::info("ablation: evaluating '{}'", name);
    reports.push_back(evaluate(set, config, backend, resources, name));
  }
  return reports;
}

namespace {
std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; }
}  // namespace

std::string comparison_tsv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "name\tviews_per_image\tevaluated\tskipped\tmrr\thit_rate\ttext_ms_mean\timage_ms_mean_per_image\t"
         "image_ms_per_query_estimate\tend_to_end_ms_mean\n";
  for (const EvalReport& r : reports) {
    const auto& aug = r.config.at("augmentation");
    const int views = aug.is_string() ? 1 : aug.at("total_views").get<int>();
    out << r.name << '\t' << views << '\t' << r.per_sample.size() << '\t' << r.skipped.size() << '\t'
        << fmt_opt(r.mrr) << '\t' << fmt_opt(r.hit_rate) << '\t';
    if (r.latency) {
      out << fmt::format("{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}", r.latency->text_embedding.mean_ms,
                         r.latency->image_embedding_per_image.mean_ms,
                         r.latency->image_embedding_per_query_estimate_ms, r.latency->end_to_end_per_query.mean_ms);
    } else {
      out << "n/a\tn/a\tn/a\tn/a";
    }
    out << '\n';
  }
  return out.str();
}

std::string comparison_text(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << fmt::format("{:<24} {:>8} {:>8} {:>12} {:>14}\n", "configuration", "MRR", "Hit@1", "text ms",
                     "end-to-end ms");
  for (const EvalReport& r : reports) {
    out << fmt::format("{:<24} {:>8} {:>8} {:>12} {:>14}\n", r.name, fmt_opt(r.mrr), fmt_opt(r.hit_rate),
                       r.latency ? fmt::format("{:.2f}", r.latency->text_embedding.mean_ms) : "n/a",
                       r.latency ? fmt::format("{:.2f}", r.latency->end_to_end_per_query.mean_ms) : "n/a");
  }
  return out.str();
}

}  // namespace vwsd
