#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vwsd/backend.hpp"
#include "vwsd/lexicon.hpp"
#include "vwsd/mock_backend.hpp"
#include "vwsd/onnx_clip_backend.hpp"
#include "vwsd/pipeline.hpp"
#include "vwsd/prompts.hpp"
#include "vwsd/tuning.hpp"

namespace vwsd {

enum class KeyKind { kString, kPath, kNumber, kInteger, kBool, kList };

struct ConfigKey {
  std::string_view name;
  KeyKind kind;
  std::string_view help;
};

/// Every accepted configuration key.
const std::vector<ConfigKey>& config_keys();

/// Flat "key = value" configuration. '#' starts a comment; blank lines are ignored.
/// Relative paths in a file resolve against the file's directory; relative paths set
/// programmatically (command-line overrides) resolve against the working directory.
class ConfigFile {
 public:
  ConfigFile() = default;

  /// Throws ConfigError naming the first unknown key or malformed line.
  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile parse(std::string_view text, const std::filesystem::path& base_dir = {});

  /// Throws ConfigError for an undocumented key.
  void set(std::string_view key, std::string value);
  /// "key=value".
  void set_assignment(std::string_view assignment);
  /// Later values win.
  void merge(const ConfigFile& other);

  std::optional<std::string> get(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  void set_resolved(std::string_view key, std::string value, const std::filesystem::path& base_dir);

  std::map<std::string, std::string, std::less<>> values_;
};

struct TuneSettings {
  std::size_t trials = 20;
  std::string strategy = "quasi-random";
  SearchSpace space;
  double validation_fraction = 0.8;
  std::uint64_t split_seed = 0;
};

/// Typed view of a ConfigFile.
struct Settings {
  PipelineConfig pipeline;
  std::string backend = "mock";
  MockBackendOptions mock;
  std::optional<std::filesystem::path> mock_image_aliases;
  ClipOnnxOptions clip;

  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> gold;
  std::optional<std::filesystem::path> images;
  Split split = Split::kCustom;

  std::optional<std::filesystem::path> lexicon;
  std::string lexicon_format = "fixture";
  std::optional<std::filesystem::path> translations;

  TuneSettings tune;
};

/// Throws ConfigError naming the offending key on a bad value or an inconsistent combination.
Settings build_settings(const ConfigFile& config);

/// Flat key/value rendering of a pipeline configuration, loadable with ConfigFile::parse.
std::string render_pipeline_config(const PipelineConfig& config);

std::unique_ptr<EmbeddingBackend> make_backend(const Settings& settings);
std::unique_ptr<LexicalResource> make_lexicon(const Settings& settings);
std::unique_ptr<Translator> make_translator(const Settings& settings);

}  // namespace vwsd
