#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vwsd/config.hpp"
#include "vwsd/errors.hpp"
#include "vwsd/pipeline.hpp"
#include "vwsd/tuning.hpp"

namespace vwsd::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string data;
  std::string gold;
  std::string images;
  std::optional<long long> seed;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("-c,--config", o.config, "configuration file");
  cmd.add_option("--set", o.overrides, "override a config key: key=value (repeatable)")->allow_extra_args(false);
  cmd.add_option("--data", o.data, "dataset TSV (overrides the 'data' key)");
  cmd.add_option("--gold", o.gold, "gold file (overrides the 'gold' key)");
  cmd.add_option("--images", o.images, "image root (overrides the 'images' key)");
  cmd.add_option("--seed", o.seed, "augmentation seed (overrides the 'seed' key)");
}

/// Config file, then dedicated flags, then --set overrides.
ConfigFile assemble(const CommonOptions& o) {
  ConfigFile config;
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw ConfigError("config file not found: " + o.config);
    config = ConfigFile::load(o.config);
  }
  if (!o.data.empty()) config.set("data", o.data);
  if (!o.gold.empty()) config.set("gold", o.gold);
  if (!o.images.empty()) config.set("images", o.images);
  if (o.seed) config.set("seed", std::to_string(*o.seed));
  for (const std::string& a : o.overrides) config.set_assignment(a);
  return config;
}

void require_file(const std::optional<fs::path>& path, std::string_view key) {
  if (!path) throw ConfigError(fmt::format("config key '{}' is required", key));
  if (!fs::exists(*path)) throw ConfigError(fmt::format("{} not found: {}", key, path->string()));
}

SampleSet load_samples(const Settings& s) {
  require_file(s.data, "data");
  if (s.gold) require_file(s.gold, "gold");
  const fs::path images = s.images ? *s.images : s.data->parent_path();
  SampleSet set = load_dataset(*s.data, s.gold.value_or(fs::path{}), images, s.split);
  for (const Sample& sample : set.samples) {
    for (const std::string& w : validation_warnings(sample)) spdlog::warn("{}: {}", sample.id, w);
  }
  return set;
}

struct Runtime {
  std::unique_ptr<EmbeddingBackend> backend;
  std::unique_ptr<LexicalResource> lexicon;
  std::unique_ptr<Translator> translator;

  explicit Runtime(const Settings& s)
      : backend(make_backend(s)), lexicon(make_lexicon(s)), translator(make_translator(s)) {}

  PipelineResources resources() const { return {lexicon.get(), translator.get()}; }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

std::string summary_line(const EvalReport& r) {
  const auto fmt_metric = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; };
  return fmt::format("{}: MRR {} | Hit Rate {} | {} evaluated, {} skipped", r.name, fmt_metric(r.mrr),
                     fmt_metric(r.hit_rate), r.per_sample.size(), r.skipped.size());
}

int cmd_evaluate(const CommonOptions& o, const std::string& output, std::ostream& out) {
  const Settings s = build_settings(assemble(o));
  const SampleSet set = load_samples(s);
  const Runtime rt(s);
  const EvalReport report = evaluate(set, s.pipeline, *rt.backend, rt.resources(), "evaluate");
  write_text(output, to_json(report).dump(2) + "\n");
  out << summary_line(report) << "\n";
  if (report.latency) {
    out << fmt::format("latency: text {:.2f} ms | image {:.2f} ms per image | end-to-end {:.2f} ms per query\n",
                       report.latency->text_embedding.mean_ms, report.latency->image_embedding_per_image.mean_ms,
                       report.latency->end_to_end_per_query.mean_ms);
  }
  out << "report: " << output << "\n";
  return kExitOk;
}

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& presets() {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> p{
      {"vanilla", {{"channels_enabled", "context"}, {"augmentation", "single-view"}, {"definitions", "false"}}},
      {"prompting",
       {{"channels_enabled", "semantic,photo"},
        {"beta_p", "0.6"},
        {"beta_s", "0.4"},
        {"tau", "0.7"},
        {"augmentation", "single-view"}}},
      {"augmentation", {{"channels_enabled", "context"}, {"augmentation", "profile"}}},
      {"combined",
       {{"channels_enabled", "semantic,photo"},
        {"beta_p", "0.6"},
        {"beta_s", "0.4"},
        {"tau", "0.7"},
        {"augmentation", "profile"}}},
  };
  return p;
}

/// "NAME" names a preset; "NAME=file" overlays a config file on the base configuration.
NamedConfig resolve_variant(const std::string& spec, const ConfigFile& base, const std::vector<std::string>& overrides) {
  ConfigFile config = base;
  std::string name = spec;
  if (const auto eq = spec.find('='); eq != std::string::npos) {
    name = spec.substr(0, eq);
    const std::string file = spec.substr(eq + 1);
    if (!fs::exists(file)) throw ConfigError("variant config not found: " + file);
    config.merge(ConfigFile::load(file));
  } else {
    const auto it = presets().find(spec);
    if (it == presets().end()) {
      throw ConfigError(fmt::format("unknown variant '{}' (presets: vanilla, prompting, augmentation, combined)", spec));
    }
    for (const auto& [k, v] : it->second) config.set(k, v);
  }
  if (name.empty()) throw ConfigError("variant name is empty: " + spec);
  // Explicit --set overrides apply to every variant.
  for (const std::string& a : overrides) config.set_assignment(a);
  return {name, build_settings(config).pipeline};
}

int cmd_ablate(const CommonOptions& o, std::vector<std::string> variants, const std::string& output_dir,
               std::ostream& out) {
  const ConfigFile base = assemble(o);
  const Settings s = build_settings(base);
  if (variants.empty()) variants = {"vanilla", "prompting", "augmentation", "combined"};
  std::vector<NamedConfig> configs;
  for (const std::string& v : variants) {
    NamedConfig c = resolve_variant(v, base, o.overrides);
    const bool duplicate = std::any_of(configs.begin(), configs.end(), [&](const NamedConfig& x) { return x.first == c.first; });
    if (duplicate) throw ConfigError("duplicate variant name '" + c.first + "'");
    configs.push_back(std::move(c));
  }
  const SampleSet set = load_samples(s);
  const Runtime rt(s);
  const std::vector<EvalReport> reports = run_ablation(set, configs, *rt.backend, rt.resources());
  for (const EvalReport& r : reports) write_text(fs::path(output_dir) / (r.name + ".json"), to_json(r).dump(2) + "\n");
  write_text(fs::path(output_dir) / "comparison.tsv", comparison_tsv(reports));
  out << comparison_text(reports);
  return kExitOk;
}

int cmd_tune(const CommonOptions& o, std::optional<long long> trials, const std::string& output_dir, std::ostream& out) {
  ConfigFile config = assemble(o);
  if (trials) config.set("trials", std::to_string(*trials));
  const Settings s = build_settings(config);
  const SampleSet train = load_samples(s);
  const Runtime rt(s);

  std::unique_ptr<SearchStrategy> strategy;
  if (s.tune.strategy == "model-based") {
    strategy = std::make_unique<ModelBasedSearch>(s.tune.space, s.pipeline.seed);
  } else {
    strategy = std::make_unique<QuasiRandomSearch>(s.tune.space, s.pipeline.seed);
  }
  const TuningResult result =
      tune_hyperparameters(train, s.pipeline, *strategy, s.tune.trials, evaluation_objective(*rt.backend, rt.resources()),
                           s.tune.validation_fraction, s.tune.split_seed);

  nlohmann::json log = nlohmann::json::array();
  for (const Trial& t : result.trials) log.push_back(to_json(t));
  write_text(fs::path(output_dir) / "trials.json", log.dump(2) + "\n");
  if (!result.best_trial) {
    spdlog::error("every trial failed");
    return kExitRuntime;
  }
  write_text(fs::path(output_dir) / "best.cfg", render_pipeline_config(result.best));
  const Trial& b = *result.best_trial;
  out << fmt::format("{} trials ({} fit / {} validation samples, {} search)\n", result.trials.size(), result.train_size,
                     result.validation_size, strategy->name());
  out << fmt::format("best trial {}: beta_p={:.4f} beta_s={:.4f} tau={:.4f} validation MRR {:.4f} Hit Rate {:.4f}\n",
                     b.number, b.params.beta_p, b.params.beta_s, b.params.tau, *b.mrr, *b.hit_rate);
  out << "best config: " << (fs::path(output_dir) / "best.cfg").string() << "\n";
  return kExitOk;
}

int cmd_predict(const CommonOptions& o, const std::string& target, const std::string& phrase,
                const std::vector<std::string>& image_paths, std::ostream& out) {
  if (image_paths.size() != kCandidatesPerSample) {
    throw InvalidArgument(fmt::format("predict needs exactly {} images, got {}", kCandidatesPerSample, image_paths.size()));
  }
  for (const std::string& p : image_paths) {
    if (!fs::exists(p)) throw ConfigError("image not found: " + p);
  }
  const Settings s = build_settings(assemble(o));
  const Runtime rt(s);
  Sample sample;
  sample.id = "predict";
  sample.target_word = target;
  sample.context_phrase = phrase;
  std::copy(image_paths.begin(), image_paths.end(), sample.candidates.begin());
  SampleSet set;
  set.samples = {sample};
  const RankingResult r = predict_sample(sample, set, s.pipeline, *rt.backend, rt.resources());
  out << "rank\tindex\tscore\timage\n";
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    const int idx = r.order[k];
    out << fmt::format("{}\t{}\t{:.6f}\t{}\n", k + 1, idx, r.scores[static_cast<std::size_t>(idx)],
                       image_paths[static_cast<std::size_t>(idx)]);
  }
  return kExitOk;
}

int cmd_dump_views(const CommonOptions& o, const std::string& image_path, std::string key, const std::string& output_dir,
                   std::ostream& out) {
  const Settings s = build_settings(assemble(o));
  const int resolution = s.backend == "onnx-clip" ? s.clip.preprocess.resolution : s.mock.image_resolution;
  PipelineConfig pipeline = s.pipeline;
  if (!pipeline.augmentation) pipeline.augmentation = AugmentationProfile{};
  const AugmentationProfile profile = pipeline.effective_profile(resolution);
  if (!fs::exists(image_path)) throw ConfigError("image not found: " + image_path);
  if (key.empty()) key = fs::path(image_path).filename().string();
  const ViewSet views = generate_views(load_image(image_path), profile, key);
  const auto written = dump_views(views, output_dir);
  out << fmt::format("{} views written to {}\n", written.size(), output_dir);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visual word sense disambiguation harness", "vwsd"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off");

  CommonOptions common;

  std::string eval_output = "report.json";
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a configuration on a dataset");
  add_common(*evaluate_cmd, common);
  evaluate_cmd->add_option("-o,--output", eval_output, "report JSON path");

  std::vector<std::string> variants;
  std::string ablate_dir = "ablation";
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "evaluate several configurations on the same samples");
  add_common(*ablate_cmd, common);
  ablate_cmd->add_option("--variant", variants, "preset name, or NAME=overlay.cfg (repeatable)")->allow_extra_args(false);
  ablate_cmd->add_option("-o,--output-dir", ablate_dir, "directory for reports and comparison.tsv");

  std::optional<long long> trials;
  std::string tune_dir = "tuning";
  CLI::App* tune_cmd = app.add_subcommand("tune", "search fusion weights and temperature on a validation split");
  add_common(*tune_cmd, common);
  tune_cmd->add_option("--trials", trials, "number of trials (overrides the 'trials' key)");
  tune_cmd->add_option("-o,--output-dir", tune_dir, "directory for trials.json and best.cfg");

  std::string target;
  std::string phrase;
  std::vector<std::string> images;
  CLI::App* predict_cmd = app.add_subcommand("predict", "rank ten candidate images for one phrase");
  add_common(*predict_cmd, common);
  predict_cmd->add_option("target", target, "target word")->required();
  predict_cmd->add_option("phrase", phrase, "context phrase")->required();
  predict_cmd->add_option("candidates", images, "ten candidate image paths")->required();

  std::string view_image;
  std::string view_key;
  std::string view_dir = "views";
  CLI::App* views_cmd = app.add_subcommand("dump-views", "write the augmented views of one image");
  add_common(*views_cmd, common);
  views_cmd->add_option("image", view_image, "image path")->required();
  views_cmd->add_option("--key", view_key, "key seeding the stochastic views (default: file name)");
  views_cmd->add_option("-o,--output-dir", view_dir, "output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto level = spdlog::level::from_str(log_level);
  if (level == spdlog::level::off && log_level != "off") {
    err << "error: unknown log level '" << log_level << "'\n";
    return kExitUsage;
  }
  spdlog::set_level(level);

  try {
    if (*evaluate_cmd) return cmd_evaluate(common, eval_output, out);
    if (*ablate_cmd) return cmd_ablate(common, variants, ablate_dir, out);
    if (*tune_cmd) return cmd_tune(common, trials, tune_dir, out);
    if (*predict_cmd) return cmd_predict(common, target, phrase, images, out);
    return cmd_dump_views(common, view_image, view_key, view_dir, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DatasetError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace vwsd::cli
