#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "vwsd/backend.hpp"

namespace vwsd {

struct MockBackendOptions {
  int embedding_dim = 512;
  int text_context_limit = 77;
  int image_resolution = 224;
  /// Subword length used by the mock tokenizer; words longer than this split into several tokens.
  std::size_t max_subword_length = 4;
};

/// Weight-free deterministic backend.
///
/// Every embedding is a pseudo-random unit vector expanded (SplitMix64) from a
/// 64-bit FNV-1a hash of the canonical input bytes:
///   text:   "text\x1f" + text
///   image:  "image\x1f" + "<rows>x<cols>\x1f" + pixel bytes after resizing
///   hidden: "hidden\x1f" + text + "\x1f" + token index   (raw, not normalized)
/// There is no ambient state, so results agree across processes.
class MockBackend final : public EmbeddingBackend {
 public:
  explicit MockBackend(MockBackendOptions options = {});

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  Embedding encode_text(std::string_view text) const override;
  Embedding encode_image(const Image& image) const override;
  std::vector<std::string> tokenize(std::string_view text) const override;
  bool supports_token_states() const override { return true; }
  std::vector<std::vector<double>> token_states(std::string_view text) const override;

  /// Makes `image` (after resizing) encode exactly like `text`. Used to rig fixtures.
  /// Not synchronized: register aliases before sharing the backend across threads.
  void add_image_alias(const Image& image, std::string text);

  /// Hash of the resized pixel bytes, as used for image seeding.
  std::uint64_t image_key(const Image& image) const;

  /// Raw (unnormalized) vector in [-1, 1)^dim for a seed.
  static std::vector<double> expand(std::uint64_t seed, int dim);

 private:
  std::string truncate_to_limit(std::string_view text) const;

  MockBackendOptions options_;
  BackendDescriptor descriptor_;
  std::unordered_map<std::uint64_t, std::string> image_aliases_;
};

}  // namespace vwsd
