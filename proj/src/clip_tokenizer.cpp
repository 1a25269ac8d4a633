#include "vwsd/clip_tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

namespace {

constexpr std::string_view kEndOfWord = "</w>";
constexpr std::string_view kStartMarker = "<|startoftext|>";
constexpr std::string_view kEndMarker = "<|endoftext|>";

std::string utf8_encode(unsigned cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

// Reversible byte -> printable-codepoint table, in the reference vocabulary order.
std::vector<std::pair<unsigned, unsigned>> byte_table() {
  std::vector<unsigned> bs;
  for (unsigned b = '!'; b <= '~'; ++b) bs.push_back(b);
  for (unsigned b = 0xA1; b <= 0xAC; ++b) bs.push_back(b);
  for (unsigned b = 0xAE; b <= 0xFF; ++b) bs.push_back(b);
  std::vector<std::pair<unsigned, unsigned>> table;
  for (unsigned b : bs) table.emplace_back(b, b);
  unsigned n = 0;
  for (unsigned b = 0; b < 256; ++b) {
    if (std::find(bs.begin(), bs.end(), b) == bs.end()) table.emplace_back(b, 256 + n++);
  }
  return table;
}

bool is_letter(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }
bool is_digit(unsigned char c) { return std::isdigit(c) != 0; }
bool is_space(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

ClipTokenizer ClipTokenizer::from_merges_file(const std::filesystem::path& path, std::size_t max_merges) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open BPE merges file " + path.string());
  std::vector<std::pair<std::string, std::string>> merges;
  std::string line;
  std::getline(in, line);  // version header
  while (merges.size() < max_merges && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto parts = split_whitespace(line);
    if (parts.size() != 2) continue;
    merges.emplace_back(parts[0], parts[1]);
  }
  return ClipTokenizer(merges);
}

ClipTokenizer::ClipTokenizer(const std::vector<std::pair<std::string, std::string>>& merges) {
  byte_symbols_.resize(256);
  std::vector<std::string> vocab_list;
  for (const auto& [byte, cp] : byte_table()) {
    byte_symbols_[byte] = utf8_encode(cp);
    vocab_list.push_back(byte_symbols_[byte]);
  }
  const std::size_t base = vocab_list.size();
  for (std::size_t i = 0; i < base; ++i) vocab_list.push_back(vocab_list[i] + std::string(kEndOfWord));
  for (std::size_t r = 0; r < merges.size(); ++r) {
    ranks_.emplace(merges[r], r);
    vocab_list.push_back(merges[r].first + merges[r].second);
  }
  vocab_list.emplace_back(kStartMarker);
  vocab_list.emplace_back(kEndMarker);
  for (std::size_t i = 0; i < vocab_list.size(); ++i) vocab_.emplace(vocab_list[i], static_cast<int>(i));
  start_id_ = vocab_.at(std::string(kStartMarker));
  end_id_ = vocab_.at(std::string(kEndMarker));
}

std::vector<std::string> ClipTokenizer::pre_tokenize(std::string_view raw) {
  const std::string text = to_lower(join(split_whitespace(raw), " "));
  std::vector<std::string> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (text.compare(i, kStartMarker.size(), kStartMarker) == 0 ||
        text.compare(i, kEndMarker.size(), kEndMarker) == 0) {
      const std::size_t len = text.compare(i, kStartMarker.size(), kStartMarker) == 0 ? kStartMarker.size()
                                                                                        : kEndMarker.size();
      pieces.push_back(text.substr(i, len));
      i += len;
      continue;
    }
    if (c == '\'') {
      bool matched = false;
      for (std::string_view suffix : {"'s", "'t", "'re", "'ve", "'m", "'ll", "'d"}) {
        if (text.compare(i, suffix.size(), suffix) == 0) {
          pieces.emplace_back(suffix);
          i += suffix.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    std::size_t j = i;
    if (is_letter(c)) {
      while (j < text.size() && is_letter(static_cast<unsigned char>(text[j]))) ++j;
    } else if (is_digit(c)) {
      j = i + 1;
    } else {
      while (j < text.size()) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (is_space(d) || is_letter(d) || is_digit(d)) break;
        ++j;
      }
    }
    pieces.push_back(text.substr(i, j - i));
    i = j;
  }
  return pieces;
}

std::vector<std::string> ClipTokenizer::bpe(std::string_view piece) const {
  std::vector<std::string> word;
  for (char ch : piece) word.push_back(byte_symbols_[static_cast<unsigned char>(ch)]);
  if (word.empty()) return word;
  word.back() += kEndOfWord;

  while (word.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    std::pair<std::string, std::string> best;
    for (std::size_t k = 0; k + 1 < word.size(); ++k) {
      const auto it = ranks_.find({word[k], word[k + 1]});
      if (it != ranks_.end() && it->second < best_rank) {
        best_rank = it->second;
        best = it->first;
      }
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    std::vector<std::string> merged;
    for (std::size_t k = 0; k < word.size();) {
      if (k + 1 < word.size() && word[k] == best.first && word[k + 1] == best.second) {
        merged.push_back(word[k] + word[k + 1]);
        k += 2;
      } else {
        merged.push_back(word[k]);
        ++k;
      }
    }
    word = std::move(merged);
  }
  return word;
}

std::vector<std::string> ClipTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  for (const std::string& piece : pre_tokenize(text)) {
    if (piece == kStartMarker || piece == kEndMarker) {
      out.push_back(piece);
      continue;
    }
    for (std::string& sym : bpe(piece)) out.push_back(std::move(sym));
  }
  return out;
}

std::vector<int> ClipTokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const std::string& sym : tokenize(text)) {
    const auto it = vocab_.find(sym);
    if (it == vocab_.end()) throw InvalidArgument("BPE symbol missing from vocabulary: " + sym);
    ids.push_back(it->second);
  }
  return ids;
}

std::vector<int> ClipTokenizer::encode_for_model(std::string_view text, std::size_t context_length,
                                                 bool* truncated) const {
  if (context_length < 2) throw InvalidArgument("context length must leave room for start/end markers");
  std::vector<int> content = encode(text);
  const std::size_t room = context_length - 2;
  if (truncated != nullptr) *truncated = content.size() > room;
  if (content.size() > room) content.resize(room);
  std::vector<int> ids;
  ids.reserve(context_length);
  ids.push_back(start_id_);
  ids.insert(ids.end(), content.begin(), content.end());
  ids.push_back(end_id_);
  ids.resize(context_length, 0);
  return ids;
}

}  // namespace vwsd
