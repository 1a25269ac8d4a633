#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include <opencv2/dnn.hpp>

#include "vwsd/backend.hpp"
#include "vwsd/clip_tokenizer.hpp"

namespace vwsd {

/// Preprocessing constants of one checkpoint. Defaults are the OpenAI CLIP values.
struct ClipPreprocess {
  int resolution = 224;
  std::array<double, 3> mean{0.48145466, 0.4578275, 0.40821073};  // RGB
  std::array<double, 3> stddev{0.26862954, 0.26130258, 0.27577711};
};

/// Shorter side resized (bicubic) to the resolution, centre crop, RGB, scaled to [0, 1],
/// per-channel standardised. Returns a 1x3xRxR float blob.
cv::Mat preprocess_clip_image(const Image& bgr, const ClipPreprocess& pre);

struct ClipOnnxOptions {
  std::string name = "clip-onnx";
  std::filesystem::path text_model;
  std::filesystem::path image_model;
  std::filesystem::path bpe_merges;
  std::string text_input = "input_ids";
  std::string text_output = "text_embeds";
  /// Optional per-token hidden-state output ([1, context, hidden]); empty disables target pooling.
  std::string hidden_output;
  std::string image_input = "pixel_values";
  std::string image_output = "image_embeds";
  /// "cpu" or "opencl".
  std::string device = "cpu";
  int context_length = 77;
  int embedding_dim = 512;
  ClipPreprocess preprocess;
};

/// CLIP-family adapter running exported ONNX text and image towers through OpenCV DNN.
/// The networks are not reentrant, so forward passes are serialized internally.
class OnnxClipBackend final : public EmbeddingBackend {
 public:
  explicit OnnxClipBackend(ClipOnnxOptions options);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  Embedding encode_text(std::string_view text) const override;
  Embedding encode_image(const Image& image) const override;
  std::vector<std::string> tokenize(std::string_view text) const override;
  bool supports_token_states() const override { return !options_.hidden_output.empty(); }
  std::vector<std::vector<double>> token_states(std::string_view text) const override;

 private:
  cv::Mat text_blob(std::string_view text) const;

  ClipOnnxOptions options_;
  BackendDescriptor descriptor_;
  ClipTokenizer tokenizer_;
  mutable cv::dnn::Net text_net_;
  mutable cv::dnn::Net image_net_;
  mutable std::mutex text_mutex_;
  mutable std::mutex image_mutex_;
};

}  // namespace vwsd
