#include "vwsd/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"backend", KeyKind::kString, "embedding backend: mock | onnx-clip"},
      {"mock_embedding_dim", KeyKind::kInteger, "mock backend embedding dimension"},
      {"mock_image_resolution", KeyKind::kInteger, "mock backend square input resolution"},
      {"mock_image_aliases", KeyKind::kPath, "TSV of image<TAB>text: image encodes exactly like text (mock only)"},
      {"clip_text_model", KeyKind::kPath, "ONNX text tower"},
      {"clip_image_model", KeyKind::kPath, "ONNX image tower"},
      {"clip_bpe_merges", KeyKind::kPath, "CLIP BPE merges file"},
      {"clip_text_input", KeyKind::kString, "text tower input name"},
      {"clip_text_output", KeyKind::kString, "text tower pooled embedding output"},
      {"clip_hidden_output", KeyKind::kString, "text tower per-token hidden states output (optional)"},
      {"clip_image_input", KeyKind::kString, "image tower input name"},
      {"clip_image_output", KeyKind::kString, "image tower embedding output"},
      {"clip_embedding_dim", KeyKind::kInteger, "shared embedding dimension"},
      {"clip_context_length", KeyKind::kInteger, "text context length in tokens"},
      {"clip_image_resolution", KeyKind::kInteger, "image input resolution"},
      {"clip_mean", KeyKind::kList, "RGB normalization mean, comma separated"},
      {"clip_std", KeyKind::kList, "RGB normalization std, comma separated"},
      {"device", KeyKind::kString, "cpu | opencl"},
      {"data", KeyKind::kPath, "dataset TSV"},
      {"gold", KeyKind::kPath, "gold file"},
      {"images", KeyKind::kPath, "image root directory"},
      {"split", KeyKind::kString, "trial | train | test | custom"},
      {"channels_enabled", KeyKind::kList, "context | semantic,photo | semantic | photo"},
      {"contextual_pooling", KeyKind::kString, "sentence | target"},
      {"beta_p", KeyKind::kNumber, "photo channel weight"},
      {"beta_s", KeyKind::kNumber, "semantic channel weight"},
      {"semantic_templates", KeyKind::kPath, "semantic template file"},
      {"photo_templates", KeyKind::kPath, "photo template file"},
      {"synonym_photo_templates", KeyKind::kPath, "synonym photo template file"},
      {"synonym_prompts", KeyKind::kBool, "add lexical-synonym photo prompts"},
      {"augmentation", KeyKind::kString, "single-view | profile"},
      {"strategy_counts", KeyKind::kList, "e.g. tta:5,geometric:3,photometric:3,multicrop:4,grid:9,midquadrant:4"},
      {"rotation_range", KeyKind::kList, "min,max degrees"},
      {"brightness", KeyKind::kNumber, "brightness jitter strength"},
      {"contrast", KeyKind::kNumber, "contrast jitter strength"},
      {"saturation", KeyKind::kNumber, "saturation jitter strength"},
      {"blur_radius", KeyKind::kInteger, "blur radius in pixels"},
      {"center_crop", KeyKind::kNumber, "centre crop side fraction"},
      {"zoom", KeyKind::kNumber, "zoom-in crop side fraction"},
      {"slight_crop_min", KeyKind::kNumber, "minimum side fraction of the random slight crop"},
      {"tau", KeyKind::kNumber, "temperature applied to aggregated image embeddings"},
      {"lexicon", KeyKind::kPath, "lexical resource (fixture file or WordNet dict directory)"},
      {"lexicon_format", KeyKind::kString, "fixture | wordnet"},
      {"definitions", KeyKind::kBool, "blend the best-matching definition into the text embedding"},
      {"alpha", KeyKind::kNumber, "definition blend weight"},
      {"include_synonym_definitions", KeyKind::kBool, "add definitions of the top synonyms"},
      {"synonym_count", KeyKind::kInteger, "number of synonyms whose definitions are added"},
      {"translation", KeyKind::kBool, "multilingual prompt ensemble"},
      {"languages", KeyKind::kList, "translation languages, comma separated"},
      {"translations", KeyKind::kPath, "translation table TSV: language<TAB>source<TAB>translation"},
      {"seed", KeyKind::kInteger, "seed for stochastic augmentations"},
      {"workers", KeyKind::kInteger, "samples evaluated concurrently"},
      {"timing", KeyKind::kBool, "record latency statistics"},
      {"trials", KeyKind::kInteger, "tuning trials"},
      {"tune_strategy", KeyKind::kString, "quasi-random | model-based"},
      {"beta_p_range", KeyKind::kList, "lo,hi"},
      {"beta_s_range", KeyKind::kList, "lo,hi"},
      {"tau_range", KeyKind::kList, "lo,hi"},
      {"validation_fraction", KeyKind::kNumber, "share of the training samples used for fitting"},
      {"split_seed", KeyKind::kInteger, "seed of the train/validation split"},
  };
  return keys;
}

namespace {

const ConfigKey* find_key(std::string_view name) {
  const auto& keys = config_keys();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == name; });
  return it == keys.end() ? nullptr : &*it;
}

}  // namespace

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

ConfigFile ConfigFile::parse(std::string_view text, const std::filesystem::path& base_dir) {
  ConfigFile config;
  std::size_t line_no = 0;
  for (const std::string& raw : split_on(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    config.set_resolved(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
  }
  return config;
}

void ConfigFile::set_resolved(std::string_view key, std::string value, const std::filesystem::path& base_dir) {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw ConfigError(fmt::format("unknown config key '{}'", key));
  if (k->kind == KeyKind::kPath && !value.empty() && !base_dir.empty()) {
    const std::filesystem::path p(value);
    if (p.is_relative()) value = (base_dir / p).lexically_normal().string();
  }
  values_[std::string(key)] = std::move(value);
}

void ConfigFile::set(std::string_view key, std::string value) { set_resolved(key, std::move(value), {}); }

void ConfigFile::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(fmt::format("override '{}' is not of the form key=value", assignment));
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ConfigFile::merge(const ConfigFile& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::optional<std::string> ConfigFile::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

namespace {

class Reader {
 public:
  explicit Reader(const ConfigFile& config) : config_(config) {}

  std::optional<std::string> str(std::string_view key) const { return config_.get(key); }

  std::optional<double> number(std::string_view key) const {
    const auto v = config_.get(key);
    if (!v) return std::nullopt;
    return parse_double(key, *v);
  }

  std::optional<long long> integer(std::string_view key) const {
    const auto v = config_.get(key);
    if (!v) return std::nullopt;
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) bad(key, *v, "an integer");
    return out;
  }

  std::optional<bool> boolean(std::string_view key) const {
    const auto v = config_.get(key);
    if (!v) return std::nullopt;
    const std::string s = to_lower(*v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad(key, *v, "a boolean");
  }

  std::optional<std::vector<std::string>> list(std::string_view key) const {
    const auto v = config_.get(key);
    if (!v) return std::nullopt;
    std::vector<std::string> out;
    for (const std::string& part : split_on(*v, ',')) {
      std::string t = trim(part);
      if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
  }

  std::optional<std::vector<double>> numbers(std::string_view key) const {
    const auto items = list(key);
    if (!items) return std::nullopt;
    std::vector<double> out;
    for (const std::string& s : *items) out.push_back(parse_double(key, s));
    return out;
  }

  std::optional<ParamRange> range(std::string_view key) const {
    const auto v = numbers(key);
    if (!v) return std::nullopt;
    if (v->size() != 2) bad(key, *config_.get(key), "a lo,hi pair");
    return ParamRange{(*v)[0], (*v)[1]};
  }

  std::optional<std::filesystem::path> path(std::string_view key) const {
    const auto v = config_.get(key);
    if (!v || v->empty()) return std::nullopt;
    return std::filesystem::path(*v);
  }

  [[noreturn]] static void bad(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not {}", key, value, expected));
  }

 private:
  static double parse_double(std::string_view key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used != s.size()) bad(key, s, "a number");
      return d;
    } catch (const std::logic_error&) {
      bad(key, s, "a number");
    }
  }

  const ConfigFile& config_;
};

template <typename T, typename U>
void assign(T& target, const std::optional<U>& value) {
  if (value) target = static_cast<T>(*value);
}

}  // namespace

Settings build_settings(const ConfigFile& config) {
  const Reader r(config);
  Settings s;
  PipelineConfig& p = s.pipeline;

  assign(s.backend, r.str("backend"));
  if (s.backend != "mock" && s.backend != "onnx-clip") {
    Reader::bad("backend", s.backend, "one of mock, onnx-clip");
  }
  assign(s.mock.embedding_dim, r.integer("mock_embedding_dim"));
  assign(s.mock.image_resolution, r.integer("mock_image_resolution"));
  s.mock_image_aliases = r.path("mock_image_aliases");

  if (auto v = r.path("clip_text_model")) s.clip.text_model = *v;
  if (auto v = r.path("clip_image_model")) s.clip.image_model = *v;
  if (auto v = r.path("clip_bpe_merges")) s.clip.bpe_merges = *v;
  assign(s.clip.text_input, r.str("clip_text_input"));
  assign(s.clip.text_output, r.str("clip_text_output"));
  assign(s.clip.hidden_output, r.str("clip_hidden_output"));
  assign(s.clip.image_input, r.str("clip_image_input"));
  assign(s.clip.image_output, r.str("clip_image_output"));
  assign(s.clip.embedding_dim, r.integer("clip_embedding_dim"));
  assign(s.clip.context_length, r.integer("clip_context_length"));
  assign(s.clip.preprocess.resolution, r.integer("clip_image_resolution"));
  for (const auto& [key, target] : {std::pair{"clip_mean", &s.clip.preprocess.mean},
                                    std::pair{"clip_std", &s.clip.preprocess.stddev}}) {
    if (const auto v = r.numbers(key)) {
      if (v->size() != 3) Reader::bad(key, *config.get(key), "three comma-separated numbers");
      std::copy(v->begin(), v->end(), target->begin());
    }
  }
  assign(s.clip.device, r.str("device"));

  s.data = r.path("data");
  s.gold = r.path("gold");
  s.images = r.path("images");
  if (const auto v = r.str("split")) {
    try {
      s.split = parse_split(*v);
    } catch (const InvalidArgument&) {
      Reader::bad("split", *v, "one of trial, train, test, custom");
    }
  }

  if (const auto channels = r.list("channels_enabled")) {
    p.context_channel = p.semantic_channel = p.photo_channel = false;
    for (const std::string& c : *channels) {
      if (c == "context") {
        p.context_channel = true;
      } else if (c == "semantic") {
        p.semantic_channel = true;
      } else if (c == "photo") {
        p.photo_channel = true;
      } else {
        Reader::bad("channels_enabled", c, "one of context, semantic, photo");
      }
    }
  }
  if (const auto v = r.str("contextual_pooling")) {
    if (*v == "sentence") {
      p.pooling = ContextPooling::kSentence;
    } else if (*v == "target") {
      p.pooling = ContextPooling::kTarget;
    } else {
      Reader::bad("contextual_pooling", *v, "sentence or target");
    }
  }
  assign(p.weights.beta_p, r.number("beta_p"));
  assign(p.weights.beta_s, r.number("beta_s"));
  try {
    if (auto v = r.path("semantic_templates")) p.templates.semantic = PromptTemplates::load_file(*v);
    if (auto v = r.path("photo_templates")) p.templates.photo = PromptTemplates::load_file(*v);
    if (auto v = r.path("synonym_photo_templates")) p.templates.synonym_photo = PromptTemplates::load_file(*v);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  assign(p.synonym_prompts, r.boolean("synonym_prompts"));

  const std::string mode = r.str("augmentation").value_or("single-view");
  if (mode == "profile") {
    AugmentationProfile profile;
    if (const auto counts = r.list("strategy_counts")) {
      profile.strategy_counts.fill(0);
      for (const std::string& item : *counts) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) Reader::bad("strategy_counts", item, "strategy:count");
        try {
          const Strategy strategy = parse_strategy(trim(item.substr(0, colon)));
          profile.strategy_counts[static_cast<std::size_t>(strategy)] = std::stoi(item.substr(colon + 1));
        } catch (const std::exception&) {
          Reader::bad("strategy_counts", item, "strategy:count with a known strategy");
        }
      }
    }
    if (const auto rot = r.numbers("rotation_range")) {
      if (rot->size() != 2) Reader::bad("rotation_range", *config.get("rotation_range"), "a min,max pair");
      profile.rotation_min_degrees = (*rot)[0];
      profile.rotation_max_degrees = (*rot)[1];
    }
    assign(profile.brightness, r.number("brightness"));
    assign(profile.contrast, r.number("contrast"));
    assign(profile.saturation, r.number("saturation"));
    assign(profile.blur_radius, r.integer("blur_radius"));
    assign(profile.center_crop_fraction, r.number("center_crop"));
    assign(profile.zoom_fraction, r.number("zoom"));
    assign(profile.slight_crop_min, r.number("slight_crop_min"));
    p.augmentation = profile;
  } else if (mode != "single-view") {
    Reader::bad("augmentation", mode, "single-view or profile");
  }
  assign(p.tau, r.number("tau"));

  s.lexicon = r.path("lexicon");
  assign(s.lexicon_format, r.str("lexicon_format"));
  if (s.lexicon_format != "fixture" && s.lexicon_format != "wordnet") {
    Reader::bad("lexicon_format", s.lexicon_format, "fixture or wordnet");
  }
  assign(p.definitions, r.boolean("definitions"));
  assign(p.alpha, r.number("alpha"));
  assign(p.include_synonym_definitions, r.boolean("include_synonym_definitions"));
  if (const auto v = r.integer("synonym_count")) {
    if (*v < 0) Reader::bad("synonym_count", std::to_string(*v), "non-negative");
    p.synonym_count = static_cast<std::size_t>(*v);
  }
  assign(p.translation, r.boolean("translation"));
  assign(p.languages, r.list("languages"));
  s.translations = r.path("translations");

  if (const auto v = r.integer("seed")) p.seed = static_cast<std::uint64_t>(*v);
  assign(p.workers, r.integer("workers"));
  assign(p.timing, r.boolean("timing"));

  if (const auto v = r.integer("trials")) {
    if (*v < 1) Reader::bad("trials", std::to_string(*v), "at least 1");
    s.tune.trials = static_cast<std::size_t>(*v);
  }
  assign(s.tune.strategy, r.str("tune_strategy"));
  if (s.tune.strategy != "quasi-random" && s.tune.strategy != "model-based") {
    Reader::bad("tune_strategy", s.tune.strategy, "quasi-random or model-based");
  }
  assign(s.tune.space.beta_p, r.range("beta_p_range"));
  assign(s.tune.space.beta_s, r.range("beta_s_range"));
  assign(s.tune.space.tau, r.range("tau_range"));
  assign(s.tune.validation_fraction, r.number("validation_fraction"));
  if (const auto v = r.integer("split_seed")) s.tune.split_seed = static_cast<std::uint64_t>(*v);

  if ((p.definitions || p.synonym_prompts) && !s.lexicon) {
    throw ConfigError("config key 'lexicon' is required when definitions or synonym_prompts is enabled");
  }
  if (p.translation && !s.translations) {
    throw ConfigError("config key 'translations' is required when translation is enabled");
  }
  p.validate();
  try {
    s.tune.space.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::string render_pipeline_config(const PipelineConfig& c) {
  std::vector<std::string> channels;
  if (c.context_channel) channels.emplace_back("context");
  if (c.semantic_channel) channels.emplace_back("semantic");
  if (c.photo_channel) channels.emplace_back("photo");
  std::string out;
  out += fmt::format("channels_enabled = {}\n", join(channels, ","));
  out += fmt::format("contextual_pooling = {}\n", c.pooling == ContextPooling::kTarget ? "target" : "sentence");
  out += fmt::format("beta_p = {}\n", c.weights.beta_p);
  out += fmt::format("beta_s = {}\n", c.weights.beta_s);
  out += fmt::format("tau = {}\n", c.tau);
  out += fmt::format("synonym_prompts = {}\n", c.synonym_prompts);
  if (c.augmentation) {
    std::vector<std::string> counts;
    for (Strategy s : kStrategyOrder) counts.push_back(fmt::format("{}:{}", to_string(s), c.augmentation->count(s)));
    out += "augmentation = profile\n";
    out += fmt::format("strategy_counts = {}\n", join(counts, ","));
    const AugmentationProfile& a = *c.augmentation;
    out += fmt::format("rotation_range = {},{}\n", a.rotation_min_degrees, a.rotation_max_degrees);
    out += fmt::format("brightness = {}\ncontrast = {}\nsaturation = {}\n", a.brightness, a.contrast, a.saturation);
    out += fmt::format("blur_radius = {}\n", a.blur_radius);
    out += fmt::format("center_crop = {}\nzoom = {}\n", a.center_crop_fraction, a.zoom_fraction);
    out += fmt::format("slight_crop_min = {}\n", a.slight_crop_min);
  } else {
    out += "augmentation = single-view\n";
  }
  out += fmt::format("definitions = {}\n", c.definitions);
  out += fmt::format("alpha = {}\n", c.alpha);
  out += fmt::format("include_synonym_definitions = {}\n", c.include_synonym_definitions);
  out += fmt::format("synonym_count = {}\n", c.synonym_count);
  out += fmt::format("translation = {}\n", c.translation);
  if (!c.languages.empty()) out += fmt::format("languages = {}\n", join(c.languages, ","));
  out += fmt::format("seed = {}\n", c.seed);
  return out;
}

std::unique_ptr<EmbeddingBackend> make_backend(const Settings& settings) {
  if (settings.backend == "onnx-clip") return std::make_unique<OnnxClipBackend>(settings.clip);

  auto backend = std::make_unique<MockBackend>(settings.mock);
  if (settings.mock_image_aliases) {
    std::ifstream in(*settings.mock_image_aliases);
    if (!in) throw ConfigError("cannot open mock image alias file " + settings.mock_image_aliases->string());
    const auto base = settings.mock_image_aliases->parent_path();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_on(line, '\t');
      if (fields.size() != 2) throw DatasetError("alias file needs image<TAB>text", line_no);
      std::filesystem::path image_path(trim(fields[0]));
      if (image_path.is_relative()) image_path = base / image_path;
      backend->add_image_alias(load_image(image_path), trim(fields[1]));
    }
  }
  return backend;
}

std::unique_ptr<LexicalResource> make_lexicon(const Settings& settings) {
  if (!settings.lexicon) return nullptr;
  if (settings.lexicon_format == "wordnet") return std::make_unique<WordNetLexicon>(*settings.lexicon);
  return std::make_unique<FixtureLexicon>(FixtureLexicon::load(*settings.lexicon));
}

std::unique_ptr<Translator> make_translator(const Settings& settings) {
  if (!settings.translations) return nullptr;
  return std::make_unique<TableTranslator>(TableTranslator::load(*settings.translations));
}

}  // namespace vwsd
