#include "vwsd/backend.hpp"

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

std::vector<std::vector<double>> EmbeddingBackend::token_states(std::string_view) const {
  throw Unsupported("backend '" + descriptor().name + "' does not expose token hidden states");
}

Embedding EmbeddingBackend::encode_text_target(std::string_view text, TokenSpan span) const {
  if (span.size() == 0) throw InvalidArgument("empty target token span");
  if (!supports_token_states()) {
    throw Unsupported("backend '" + descriptor().name + "' does not expose token hidden states");
  }
  const auto states = token_states(text);
  if (span.end > states.size()) {
    throw InvalidArgument("target span [" + std::to_string(span.begin) + ", " + std::to_string(span.end) +
                          ") exceeds " + std::to_string(states.size()) + " tokens");
  }
  std::vector<double> acc(states[span.begin].size(), 0.0);
  for (std::size_t t = span.begin; t < span.end; ++t) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += states[t][i];
  }
  for (double& x : acc) x /= static_cast<double>(span.size());
  return l2_normalized(std::move(acc));
}

std::vector<Embedding> EmbeddingBackend::encode_text_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(encode_text(texts[i]));
    } catch (const Error& e) {
      throw BatchError(i, e.what());
    }
  }
  return out;
}

std::vector<Embedding> EmbeddingBackend::encode_image_batch(std::span<const Image> images) const {
  std::vector<Embedding> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      out.push_back(encode_image(images[i]));
    } catch (const Error& e) {
      throw BatchError(i, e.what());
    }
  }
  return out;
}

TokenSpan find_target_span(const EmbeddingBackend& backend, std::string_view text, std::string_view target) {
  std::size_t offset = 0;
  for (const std::string& word : split_whitespace(text)) {
    const std::size_t count = backend.tokenize(word).size();
    if (iequals(word, target)) return TokenSpan{offset, offset + count};
    offset += count;
  }
  throw InvalidArgument("target '" + std::string(target) + "' not found in '" + std::string(text) + "'");
}

}  // namespace vwsd
