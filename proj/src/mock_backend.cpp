#include "vwsd/mock_backend.hpp"

#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/hashing.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

namespace {
constexpr std::string_view kSep = "\x1f";
// Start and end markers occupy two positions of the context window.
constexpr int kSpecialTokens = 2;
}  // namespace

MockBackend::MockBackend(MockBackendOptions options) : options_(options) {
  if (options_.embedding_dim <= 0 || options_.image_resolution <= 0 ||
      options_.text_context_limit <= kSpecialTokens || options_.max_subword_length == 0) {
    throw InvalidArgument("invalid mock backend options");
  }
  descriptor_ = BackendDescriptor{"mock", options_.embedding_dim, options_.text_context_limit,
                                  options_.image_resolution};
}

std::vector<double> MockBackend::expand(std::uint64_t seed, int dim) {
  SplitMix64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = rng.next_symmetric();
  return v;
}

std::vector<std::string> MockBackend::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  for (const std::string& word : split_whitespace(text)) {
    for (std::size_t i = 0; i < word.size(); i += options_.max_subword_length) {
      tokens.push_back(word.substr(i, options_.max_subword_length));
    }
  }
  return tokens;
}

std::string MockBackend::truncate_to_limit(std::string_view text) const {
  const auto limit = static_cast<std::size_t>(options_.text_context_limit - kSpecialTokens);
  std::size_t count = 0;
  for (const std::string& word : split_whitespace(text)) {
    count += (word.size() + options_.max_subword_length - 1) / options_.max_subword_length;
  }
  if (count <= limit) return std::string(text);

  spdlog::warn("text exceeds the {}-token context limit and is truncated: '{}'", options_.text_context_limit,
               text);
  std::string kept;
  std::size_t used = 0;
  for (const std::string& word : split_whitespace(text)) {
    std::string piece;
    for (std::size_t i = 0; i < word.size() && used < limit; i += options_.max_subword_length, ++used) {
      piece += word.substr(i, options_.max_subword_length);
    }
    if (piece.empty()) break;
    if (!kept.empty()) kept += ' ';
    kept += piece;
  }
  return kept;
}

Embedding MockBackend::encode_text(std::string_view text) const {
  if (trim(text).empty()) throw InvalidArgument("cannot encode empty text");
  const std::string canonical = truncate_to_limit(text);
  const std::uint64_t seed = fnv1a64(canonical, fnv1a64(std::string("text").append(kSep)));
  return l2_normalized(expand(seed, options_.embedding_dim));
}

std::vector<std::vector<double>> MockBackend::token_states(std::string_view text) const {
  const std::size_t n = tokenize(text).size();
  std::vector<std::vector<double>> states;
  states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string key = "hidden";
    key.append(kSep).append(text).append(kSep).append(std::to_string(i));
    states.push_back(expand(fnv1a64(key), options_.embedding_dim));
  }
  return states;
}

std::uint64_t MockBackend::image_key(const Image& image) const {
  if (image.empty()) throw ImageError("<memory>", "empty image");
  const Image resized = resize_square(image, options_.image_resolution);
  std::string header = "image";
  header.append(kSep)
      .append(std::to_string(resized.rows))
      .append("x")
      .append(std::to_string(resized.cols))
      .append(kSep);
  std::uint64_t h = fnv1a64(header);
  const cv::Mat contiguous = resized.isContinuous() ? resized : resized.clone();
  const std::size_t bytes = contiguous.total() * contiguous.elemSize();
  return fnv1a64(std::span<const unsigned char>(contiguous.data, bytes), h);
}

Embedding MockBackend::encode_image(const Image& image) const {
  const std::uint64_t key = image_key(image);
  if (const auto it = image_aliases_.find(key); it != image_aliases_.end()) return encode_text(it->second);
  return l2_normalized(expand(key, options_.embedding_dim));
}

void MockBackend::add_image_alias(const Image& image, std::string text) {
  image_aliases_[image_key(image)] = std::move(text);
}

}  // namespace vwsd
