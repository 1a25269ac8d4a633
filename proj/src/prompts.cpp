#include "vwsd/prompts.hpp"

#include <fstream>
#include <tuple>

#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

std::vector<std::string> PromptTemplates::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open template file " + path.string());
  std::vector<std::string> templates;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (!t.empty()) templates.push_back(std::move(t));
  }
  if (templates.empty()) throw InvalidArgument("template file " + path.string() + " is empty");
  return templates;
}

std::vector<std::string> PromptBundle::photo_channel() const {
  std::vector<std::string> all = photo_prompts;
  all.insert(all.end(), synonym_photo_prompts.begin(), synonym_photo_prompts.end());
  return all;
}

std::string context_without_target(std::string_view phrase, std::string_view target) {
  std::vector<std::string> tokens = split_whitespace(phrase);
  for (auto it = tokens.begin(); it != tokens.end(); ++it) {
    if (iequals(*it, target)) {
      tokens.erase(it);
      break;
    }
  }
  if (tokens.empty()) return trim(phrase);
  return join(tokens, " ");
}

std::string instantiate(std::string_view tmpl, std::string_view target, std::string_view context,
                        std::string_view target_syn, std::string_view context_syn) {
  std::string out(tmpl);
  // Longer placeholders first so "{t_syn}" is not consumed by "{t}".
  out = replace_all(std::move(out), "{t_syn}", target_syn);
  out = replace_all(std::move(out), "{c_syn}", context_syn);
  out = replace_all(std::move(out), "{t}", target);
  out = replace_all(std::move(out), "{c}", context);
  return out;
}

namespace {
void require_nonempty(std::string_view target, std::string_view context) {
  if (trim(target).empty() || trim(context).empty()) {
    throw InvalidArgument("prompt target and context must be nonempty");
  }
}
}  // namespace

std::vector<std::string> build_semantic_prompts(std::string_view target, std::string_view context,
                                                const PromptTemplates& templates) {
  require_nonempty(target, context);
  std::vector<std::string> prompts;
  for (const std::string& t : templates.semantic) prompts.push_back(instantiate(t, target, context));
  return prompts;
}

std::vector<std::string> build_photo_prompts(std::string_view target, std::string_view context,
                                             const std::optional<SynonymPair>& synonyms,
                                             const PromptTemplates& templates) {
  require_nonempty(target, context);
  std::vector<std::string> prompts;
  for (const std::string& t : templates.photo) prompts.push_back(instantiate(t, target, context));
  if (synonyms) {
    for (const std::string& t : templates.synonym_photo) {
      prompts.push_back(instantiate(t, target, context, synonyms->target, synonyms->context));
    }
  }
  return prompts;
}

PromptBundle build_prompt_bundle(std::string_view target, std::string_view context,
                                 const std::optional<SynonymPair>& synonyms, const PromptTemplates& templates) {
  PromptBundle bundle;
  bundle.semantic_prompts = build_semantic_prompts(target, context, templates);
  std::vector<std::string> photo = build_photo_prompts(target, context, synonyms, templates);
  const std::size_t base = templates.photo.size();
  bundle.photo_prompts.assign(photo.begin(), photo.begin() + static_cast<std::ptrdiff_t>(base));
  bundle.synonym_photo_prompts.assign(photo.begin() + static_cast<std::ptrdiff_t>(base), photo.end());
  for (std::size_t i = 0; i < bundle.semantic_prompts.size(); ++i) bundle.provenance.push_back("semantic/" + std::to_string(i));
  for (std::size_t i = 0; i < bundle.photo_prompts.size(); ++i) bundle.provenance.push_back("photo/" + std::to_string(i));
  for (std::size_t i = 0; i < bundle.synonym_photo_prompts.size(); ++i) {
    bundle.provenance.push_back("synonym_photo/" + std::to_string(i));
  }
  return bundle;
}

Embedding channel_embedding(std::span<const std::string> prompts, const EmbeddingBackend& backend) {
  if (prompts.empty()) throw InvalidArgument("channel needs at least one prompt");
  const std::vector<Embedding> embeddings = backend.encode_text_batch(prompts);
  return l2_normalized(mean_of(embeddings));
}

void FusionWeights::validate() const {
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(beta_p) || !in_unit(beta_s)) throw InvalidArgument("fusion weights must lie in [0, 1]");
  if (!(beta_p + beta_s > 0.0)) throw InvalidArgument("fusion weights must not both be zero");
}

Embedding fuse_channels(const Embedding& h_p, const Embedding& h_s, const FusionWeights& weights) {
  weights.validate();
  if (h_p.dim() != h_s.dim()) throw InvalidArgument("channel embeddings differ in dimension");
  try {
    return l2_normalized(weighted_sum(h_p, weights.beta_p, h_s, weights.beta_s));
  } catch (const DegenerateEmbedding&) {
    throw DegenerateEmbedding("degenerate fusion: weighted channel sum has zero norm");
  }
}

TableTranslator TableTranslator::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open translation table " + path.string());
  TableTranslator translator;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_on(line, '\t');
    if (fields.size() != 3) throw DatasetError("translation table needs 3 tab-separated fields", line_no);
    translator.add(trim(fields[0]), fields[1], fields[2]);
  }
  return translator;
}

void TableTranslator::add(std::string language, std::string source, std::string translation) {
  entries_.emplace_back(std::move(language), std::move(source), std::move(translation));
}

std::string TableTranslator::translate(std::string_view text, std::string_view language) const {
  for (const auto& [lang, source, translation] : entries_) {
    if (lang == language && source == text) return translation;
  }
  throw InvalidArgument("no " + std::string(language) + " translation for '" + std::string(text) + "'");
}

Embedding multilingual_channel_embedding(std::span<const std::string> prompts,
                                         std::span<const std::string> languages, const Translator& translator,
                                         const EmbeddingBackend& backend) {
  if (prompts.empty()) throw InvalidArgument("channel needs at least one prompt");
  std::vector<Embedding> all = backend.encode_text_batch(prompts);
  for (const std::string& language : languages) {
    std::vector<std::string> translated;
    try {
      for (const std::string& p : prompts) translated.push_back(translator.translate(p, language));
    } catch (const std::exception& e) {
      spdlog::warn("skipping language '{}': {}", language, e.what());
      continue;
    }
    std::vector<Embedding> embedded = backend.encode_text_batch(translated);
    all.insert(all.end(), embedded.begin(), embedded.end());
  }
  return l2_normalized(mean_of(all));
}

}  // namespace vwsd
