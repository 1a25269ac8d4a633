#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vwsd/embedding.hpp"
#include "vwsd/image.hpp"

namespace vwsd {

struct BackendDescriptor {
  std::string name;
  int embedding_dim = 0;
  /// Maximum sequence length in tokens, including start/end markers.
  int text_context_limit = 0;
  /// Square input side in pixels.
  int image_resolution = 0;
};

/// Half-open range of content-token indices, as returned by `tokenize`.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
  bool operator==(const TokenSpan&) const = default;
};

/// Text and image encoders projecting into one shared space.
///
/// Every embedding returned by a backend is L2-normalized. Implementations are
/// safe for concurrent encode calls once constructed.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  /// Whole-text embedding (end-of-sequence pooling for CLIP-style encoders).
  /// Text longer than the context limit is truncated with a logged warning.
  /// Throws InvalidArgument on empty text.
  virtual Embedding encode_text(std::string_view text) const = 0;

  /// Resizes to the descriptor resolution and encodes. Throws ImageError on an empty raster.
  virtual Embedding encode_image(const Image& image) const = 0;

  /// Content tokens of `text` (no start/end markers), in sequence order.
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;

  /// Optional capability: per-token hidden states aligned with `tokenize(text)`.
  virtual bool supports_token_states() const { return false; }
  virtual std::vector<std::vector<double>> token_states(std::string_view text) const;

  /// Mean of the hidden states in `span`, L2-normalized. Throws Unsupported when the
  /// backend has no hidden-state access and InvalidArgument for an empty or out-of-range span.
  Embedding encode_text_target(std::string_view text, TokenSpan span) const;

  /// Element-wise equal to the scalar calls, order preserved. Failures surface as BatchError.
  virtual std::vector<Embedding> encode_text_batch(std::span<const std::string> texts) const;
  virtual std::vector<Embedding> encode_image_batch(std::span<const Image> images) const;
};

/// Token span of the first whitespace-delimited word of `text` equal (case-insensitively)
/// to `target`. Tokenizes word by word, so it is exact for word-level pre-tokenizers.
/// Throws InvalidArgument when the target is not present.
TokenSpan find_target_span(const EmbeddingBackend& backend, std::string_view text, std::string_view target);

}  // namespace vwsd
