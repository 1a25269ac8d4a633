#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vwsd/backend.hpp"
#include "vwsd/embedding.hpp"

namespace vwsd {

/// Synonym inventory and glosses of one word, in resource order.
struct LexicalEntry {
  std::string word;
  /// Never contains `word` itself (case-insensitive). Underscores already mapped to spaces.
  std::vector<std::string> synonyms;
  std::vector<std::string> definitions;
};

class LexicalResource {
 public:
  virtual ~LexicalResource() = default;

  /// Exact lookup of a lower-case key with underscores in place of spaces.
  virtual std::optional<LexicalEntry> find(std::string_view key) const = 0;

  /// Identifies the resource contents (recorded in reports).
  virtual std::string version() const = 0;
};

/// In-memory resource. File format: "word<TAB>syn1|syn2<TAB>gloss1|gloss2" per line.
class FixtureLexicon final : public LexicalResource {
 public:
  FixtureLexicon() = default;
  static FixtureLexicon load(const std::filesystem::path& path);

  void add(std::string word, std::vector<std::string> synonyms, std::vector<std::string> definitions);

  std::optional<LexicalEntry> find(std::string_view key) const override;
  std::string version() const override { return version_; }

 private:
  std::map<std::string, LexicalEntry, std::less<>> entries_;
  std::string version_ = "fixture:memory";
};

/// Reads a WordNet 3.x database directory (index.noun, data.noun, ... for noun, verb, adj, adv).
/// Synsets are visited in part-of-speech order noun, verb, adjective, adverb, then index order.
/// Glosses drop their quoted usage examples. No morphological normalization is applied.
class WordNetLexicon final : public LexicalResource {
 public:
  explicit WordNetLexicon(const std::filesystem::path& dict_dir);

  std::optional<LexicalEntry> find(std::string_view key) const override;
  std::string version() const override { return version_; }

 private:
  struct Synset {
    std::vector<std::string> lemmas;
    std::string gloss;
  };
  Synset read_synset(std::size_t pos, std::size_t offset) const;

  std::vector<std::string> data_;  // raw data file contents per part of speech
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>, std::less<>> index_;
  std::string version_;
};

/// Lookup with multi-word handling: "ice cream" queries "ice_cream", then falls back to the last token.
std::optional<LexicalEntry> lookup_entry(const LexicalResource& resource, std::string_view word);

/// First lemma, in synset order, whose surface form differs from `word`.
std::optional<std::string> lookup_synonym(const LexicalResource& resource, std::string_view word);

/// Glosses of `word`, then (optionally) glosses of its first `synonym_count` synonyms, deduplicated
/// keeping the first occurrence. An empty result means "no definitions".
std::vector<std::string> candidate_definitions(const LexicalResource& resource, std::string_view word,
                                               bool include_synonyms, std::size_t synonym_count = 2);

struct DefinitionChoice {
  std::size_t index = 0;
  Embedding embedding;
  double similarity = 0.0;
};

/// Argmax of cosine(h_t, encode(definition)); ties go to the lowest index.
DefinitionChoice select_definition(const Embedding& h_t, std::span<const std::string> definitions,
                                   const EmbeddingBackend& backend);

/// Normalized `alpha * h_dstar + (1 - alpha) * h_t`. Throws DegenerateEmbedding on a zero-norm blend.
Embedding blend_definition(const Embedding& h_dstar, const Embedding& h_t, double alpha);

}  // namespace vwsd
