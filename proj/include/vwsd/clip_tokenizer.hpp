#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vwsd {

/// Byte-level BPE tokenizer compatible with the CLIP text encoder vocabulary.
///
/// The vocabulary is rebuilt from the merges list the same way the reference
/// tokenizer does it: 256 byte symbols, the same symbols with an end-of-word
/// suffix, one entry per merge, then the start/end markers.
///
/// Differences from the reference: no ftfy text repair, and every non-ASCII byte
/// counts as a letter during pre-tokenization.
class ClipTokenizer {
 public:
  /// Merges file format: first line is a version header, then one "left right" pair per line.
  /// `max_merges` mirrors the reference slicing (49152 - 256 - 2 merges).
  static ClipTokenizer from_merges_file(const std::filesystem::path& path, std::size_t max_merges = 48894);

  explicit ClipTokenizer(const std::vector<std::pair<std::string, std::string>>& merges);

  /// BPE symbols for the content of `text` (lower-cased, whitespace-collapsed).
  std::vector<std::string> tokenize(std::string_view text) const;

  std::vector<int> encode(std::string_view text) const;

  /// start + content + end, truncated so the end marker stays last, zero-padded to `context_length`.
  /// `truncated` is set when content had to be dropped.
  std::vector<int> encode_for_model(std::string_view text, std::size_t context_length, bool* truncated = nullptr) const;

  int start_id() const noexcept { return start_id_; }
  int end_id() const noexcept { return end_id_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }

  /// Pre-tokenizer word pieces (before BPE).
  static std::vector<std::string> pre_tokenize(std::string_view text);

 private:
  std::vector<std::string> bpe(std::string_view word) const;

  std::vector<std::string> byte_symbols_;  // byte value -> UTF-8 symbol
  std::map<std::pair<std::string, std::string>, std::size_t> ranks_;
  std::unordered_map<std::string, int> vocab_;
  int start_id_ = 0;
  int end_id_ = 0;
};

}  // namespace vwsd
