#include "vwsd/lexicon.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "vwsd/errors.hpp"
#include "vwsd/ranker.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

namespace {

std::string normalize_key(std::string_view word) { return replace_all(to_lower(trim(word)), " ", "_"); }

std::string surface_form(std::string_view lemma) { return replace_all(std::string(lemma), "_", " "); }

void push_unique(std::vector<std::string>& out, std::string value) {
  if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(std::move(value));
}

std::vector<std::string> split_bar_list(std::string_view field) {
  std::vector<std::string> out;
  for (const std::string& part : split_on(field, '|')) {
    std::string t = trim(part);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

FixtureLexicon FixtureLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open lexicon fixture " + path.string());
  FixtureLexicon lexicon;
  lexicon.version_ = "fixture:" + path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3) throw DatasetError("lexicon fixture needs 3 tab-separated fields", line_no);
    lexicon.add(trim(fields[0]), split_bar_list(fields[1]), split_bar_list(fields[2]));
  }
  return lexicon;
}

void FixtureLexicon::add(std::string word, std::vector<std::string> synonyms, std::vector<std::string> definitions) {
  LexicalEntry entry;
  entry.word = surface_form(word);
  for (std::string& s : synonyms) {
    std::string form = surface_form(s);
    if (!iequals(form, entry.word)) push_unique(entry.synonyms, std::move(form));
  }
  entry.definitions = std::move(definitions);
  entries_[normalize_key(word)] = std::move(entry);
}

std::optional<LexicalEntry> FixtureLexicon::find(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

namespace {
constexpr std::array<std::string_view, 4> kPosFiles{"noun", "verb", "adj", "adv"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open WordNet file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

WordNetLexicon::WordNetLexicon(const std::filesystem::path& dict_dir) {
  version_ = "wordnet:" + dict_dir.string();
  for (std::size_t pos = 0; pos < kPosFiles.size(); ++pos) {
    data_.push_back(read_file(dict_dir / ("data." + std::string(kPosFiles[pos]))));
    std::istringstream index(read_file(dict_dir / ("index." + std::string(kPosFiles[pos]))));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(index, line)) {
      ++line_no;
      if (line.empty() || line.front() == ' ') continue;  // license header
      const auto f = split_whitespace(line);
      // lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt synset_offset...
      if (f.size() < 4) throw DatasetError("malformed WordNet index line", line_no);
      const std::size_t synset_cnt = std::stoul(f[2]);
      const std::size_t p_cnt = std::stoul(f[3]);
      const std::size_t first_offset = 4 + p_cnt + 2;
      if (f.size() < first_offset + synset_cnt) throw DatasetError("truncated WordNet index line", line_no);
      auto& slots = index_[f[0]];
      for (std::size_t k = 0; k < synset_cnt; ++k) slots.emplace_back(pos, std::stoul(f[first_offset + k]));
    }
  }
}

WordNetLexicon::Synset WordNetLexicon::read_synset(std::size_t pos, std::size_t offset) const {
  const std::string& data = data_[pos];
  if (offset >= data.size()) throw DatasetError("WordNet synset offset out of range");
  const std::size_t eol = data.find('\n', offset);
  const std::string line = data.substr(offset, eol == std::string::npos ? std::string::npos : eol - offset);

  const std::size_t bar = line.find('|');
  const auto f = split_whitespace(line.substr(0, bar));
  // synset_offset lex_filenum ss_type w_cnt(hex) word lex_id ...
  if (f.size() < 4) throw DatasetError("malformed WordNet data line");
  const std::size_t w_cnt = std::stoul(f[3], nullptr, 16);
  Synset synset;
  for (std::size_t k = 0; k < w_cnt && 4 + 2 * k < f.size(); ++k) {
    std::string lemma = f[4 + 2 * k];
    if (const auto paren = lemma.find('('); paren != std::string::npos) lemma.erase(paren);  // adj marker
    synset.lemmas.push_back(surface_form(lemma));
  }

  std::vector<std::string> parts;
  if (bar != std::string::npos) {
    for (const std::string& part : split_on(line.substr(bar + 1), ';')) {
      const std::string t = trim(part);
      if (!t.empty() && t.front() != '"') parts.push_back(t);
    }
  }
  synset.gloss = join(parts, "; ");
  return synset;
}

std::optional<LexicalEntry> WordNetLexicon::find(std::string_view key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  LexicalEntry entry;
  entry.word = surface_form(key);
  // index_ slots are already grouped by part of speech in file order.
  for (const auto& [pos, offset] : it->second) {
    Synset synset = read_synset(pos, offset);
    for (std::string& lemma : synset.lemmas) {
      if (!iequals(lemma, entry.word)) push_unique(entry.synonyms, std::move(lemma));
    }
    if (!synset.gloss.empty()) entry.definitions.push_back(std::move(synset.gloss));
  }
  return entry;
}

std::optional<LexicalEntry> lookup_entry(const LexicalResource& resource, std::string_view word) {
  if (trim(word).empty()) throw InvalidArgument("lexical lookup of an empty word");
  if (auto entry = resource.find(normalize_key(word))) return entry;
  const auto tokens = split_whitespace(word);
  if (tokens.size() > 1) return resource.find(normalize_key(tokens.back()));
  return std::nullopt;
}

std::optional<std::string> lookup_synonym(const LexicalResource& resource, std::string_view word) {
  const auto entry = lookup_entry(resource, word);
  if (!entry) return std::nullopt;
  for (const std::string& s : entry->synonyms) {
    if (!iequals(s, trim(word))) return s;
  }
  return std::nullopt;
}

std::vector<std::string> candidate_definitions(const LexicalResource& resource, std::string_view word,
                                               bool include_synonyms, std::size_t synonym_count) {
  std::vector<std::string> out;
  const auto entry = lookup_entry(resource, word);
  if (!entry) return out;
  for (const std::string& d : entry->definitions) push_unique(out, d);
  if (!include_synonyms) return out;

  std::size_t used = 0;
  for (const std::string& syn : entry->synonyms) {
    if (used == synonym_count) break;
    if (iequals(syn, trim(word))) continue;
    ++used;
    if (const auto syn_entry = lookup_entry(resource, syn)) {
      for (const std::string& d : syn_entry->definitions) push_unique(out, d);
    }
  }
  return out;
}

DefinitionChoice select_definition(const Embedding& h_t, std::span<const std::string> definitions,
                                   const EmbeddingBackend& backend) {
  if (definitions.empty()) throw InvalidArgument("no candidate definitions");
  const std::vector<Embedding> embedded = backend.encode_text_batch(definitions);
  DefinitionChoice best;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    const double sim = cosine(h_t, embedded[i]);
    if (i == 0 || sim > best.similarity) {
      best.index = i;
      best.similarity = sim;
    }
  }
  best.embedding = embedded[best.index];
  return best;
}

Embedding blend_definition(const Embedding& h_dstar, const Embedding& h_t, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (h_dstar.dim() != h_t.dim()) throw InvalidArgument("definition and context embeddings differ in dimension");
  // Endpoints of the average are the inputs themselves, already unit-norm.
  if (alpha == 0.0 && h_t.normalized) return h_t;
  if (alpha == 1.0 && h_dstar.normalized) return h_dstar;
  try {
    return l2_normalized(weighted_sum(h_dstar, alpha, h_t, 1.0 - alpha));
  } catch (const DegenerateEmbedding&) {
    throw DegenerateEmbedding("degenerate definition blend: zero-norm weighted average");
  }
}

}  // namespace vwsd
