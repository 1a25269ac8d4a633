#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vwsd/backend.hpp"
#include "vwsd/embedding.hpp"

namespace vwsd {

/// Template sets per channel. Placeholders: {t} target, {c} context, {t_syn}, {c_syn} synonyms.
struct PromptTemplates {
  std::vector<std::string> semantic{
      "{t} related to {c}",
      "the concept of {t} in {c}",
      "{t} in the context of {c}",
  };
  std::vector<std::string> photo{
      "a photo of {t} {c}",
      "{t} with {c}, natural scene",
      "{t} appearing in a {c} environment",
  };
  std::vector<std::string> synonym_photo{
      "a photo of {t_syn} {c_syn}",
  };

  /// One template per line; blank lines are skipped. Throws InvalidArgument on an empty file.
  static std::vector<std::string> load_file(const std::filesystem::path& path);
};

/// (target synonym, context synonym) used by the synonym photo templates.
struct SynonymPair {
  std::string target;
  std::string context;
};

struct PromptBundle {
  std::vector<std::string> semantic_prompts;
  std::vector<std::string> photo_prompts;
  std::vector<std::string> synonym_photo_prompts;
  /// Template id per prompt, e.g. "semantic/0", in the order semantic, photo, synonym_photo.
  std::vector<std::string> provenance;

  /// Photo channel input: base photo prompts followed by synonym prompts.
  std::vector<std::string> photo_channel() const;
};

/// Context phrase with the first token equal to the target removed ("bank erosion" -> "erosion").
/// Falls back to the whole phrase when nothing else would remain.
std::string context_without_target(std::string_view phrase, std::string_view target);

std::string instantiate(std::string_view tmpl, std::string_view target, std::string_view context,
                        std::string_view target_syn = {}, std::string_view context_syn = {});

std::vector<std::string> build_semantic_prompts(std::string_view target, std::string_view context,
                                                const PromptTemplates& templates = {});

/// Base photo prompts, then synonym prompts when `synonyms` is present.
std::vector<std::string> build_photo_prompts(std::string_view target, std::string_view context,
                                             const std::optional<SynonymPair>& synonyms,
                                             const PromptTemplates& templates = {});

PromptBundle build_prompt_bundle(std::string_view target, std::string_view context,
                                 const std::optional<SynonymPair>& synonyms, const PromptTemplates& templates = {});

/// Encodes every prompt, averages the unit embeddings, normalizes the mean.
Embedding channel_embedding(std::span<const std::string> prompts, const EmbeddingBackend& backend);

struct FusionWeights {
  double beta_p = 0.5;
  double beta_s = 0.5;

  /// Throws InvalidArgument unless both lie in [0, 1] with a positive sum.
  void validate() const;
};

/// Normalized `beta_p * h_p + beta_s * h_s`. Throws DegenerateEmbedding on a zero-norm sum.
Embedding fuse_channels(const Embedding& h_p, const Embedding& h_s, const FusionWeights& weights);

class Translator {
 public:
  virtual ~Translator() = default;
  /// Throws on failure.
  virtual std::string translate(std::string_view text, std::string_view language) const = 0;
};

/// Lookup-table translator. File format: "language<TAB>source<TAB>translation" per line.
class TableTranslator final : public Translator {
 public:
  TableTranslator() = default;
  static TableTranslator load(const std::filesystem::path& path);

  void add(std::string language, std::string source, std::string translation);
  std::string translate(std::string_view text, std::string_view language) const override;

 private:
  std::vector<std::tuple<std::string, std::string, std::string>> entries_;
};

/// English prompts plus their translations into each language, all encoded, averaged and normalized.
/// A language whose translation fails is skipped with a warning.
Embedding multilingual_channel_embedding(std::span<const std::string> prompts,
                                         std::span<const std::string> languages, const Translator& translator,
                                         const EmbeddingBackend& backend);

}  // namespace vwsd
