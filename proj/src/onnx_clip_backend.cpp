#include "vwsd/onnx_clip_backend.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>
#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

cv::Mat preprocess_clip_image(const Image& bgr, const ClipPreprocess& pre) {
  if (bgr.empty()) throw ImageError("<memory>", "empty image");
  const int r = pre.resolution;
  const double scale = static_cast<double>(r) / std::min(bgr.rows, bgr.cols);
  const int w = std::max(r, static_cast<int>(std::lround(bgr.cols * scale)));
  const int h = std::max(r, static_cast<int>(std::lround(bgr.rows * scale)));
  cv::Mat resized;
  cv::resize(bgr, resized, cv::Size(w, h), 0, 0, cv::INTER_CUBIC);
  const cv::Rect crop((w - r) / 2, (h - r) / 2, r, r);

  cv::Mat rgb;
  cv::cvtColor(resized(crop), rgb, cv::COLOR_BGR2RGB);
  rgb.convertTo(rgb, CV_32FC3, 1.0 / 255.0);
  cv::subtract(rgb, cv::Scalar(pre.mean[0], pre.mean[1], pre.mean[2]), rgb);
  cv::divide(rgb, cv::Scalar(pre.stddev[0], pre.stddev[1], pre.stddev[2]), rgb);
  return cv::dnn::blobFromImage(rgb);
}

namespace {

cv::dnn::Net load_net(const std::filesystem::path& path, const std::string& device) {
  if (!std::filesystem::exists(path)) throw InvalidArgument("model file not found: " + path.string());
  cv::dnn::Net net = cv::dnn::readNetFromONNX(path.string());
  net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
  if (device == "cpu") {
    net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
  } else if (device == "opencl") {
    net.setPreferableTarget(cv::dnn::DNN_TARGET_OPENCL);
  } else {
    throw InvalidArgument("unknown device '" + device + "' (expected cpu or opencl)");
  }
  return net;
}

std::vector<double> row_to_vector(const cv::Mat& out) {
  cv::Mat flat = out.reshape(1, 1);
  flat.convertTo(flat, CV_64F);
  return std::vector<double>(flat.begin<double>(), flat.end<double>());
}

}  // namespace

OnnxClipBackend::OnnxClipBackend(ClipOnnxOptions options)
    : options_(std::move(options)),
      tokenizer_(ClipTokenizer::from_merges_file(options_.bpe_merges)),
      text_net_(load_net(options_.text_model, options_.device)),
      image_net_(load_net(options_.image_model, options_.device)) {
  descriptor_ = BackendDescriptor{options_.name, options_.embedding_dim, options_.context_length,
                                  options_.preprocess.resolution};
}

std::vector<std::string> OnnxClipBackend::tokenize(std::string_view text) const {
  return tokenizer_.tokenize(text);
}

cv::Mat OnnxClipBackend::text_blob(std::string_view text) const {
  if (trim(text).empty()) throw InvalidArgument("cannot encode empty text");
  bool truncated = false;
  const auto ids =
      tokenizer_.encode_for_model(text, static_cast<std::size_t>(options_.context_length), &truncated);
  if (truncated) {
    spdlog::warn("text exceeds the {}-token context limit and is truncated: '{}'", options_.context_length, text);
  }
  // OpenCV DNN consumes float tensors; token ids below 2^24 are exact.
  cv::Mat blob(1, options_.context_length, CV_32F);
  for (int i = 0; i < options_.context_length; ++i) blob.at<float>(0, i) = static_cast<float>(ids[i]);
  return blob;
}

Embedding OnnxClipBackend::encode_text(std::string_view text) const {
  const cv::Mat blob = text_blob(text);
  cv::Mat out;
  {
    std::lock_guard lock(text_mutex_);
    text_net_.setInput(blob, options_.text_input);
    out = text_net_.forward(options_.text_output).clone();
  }
  Embedding e = l2_normalized(row_to_vector(out));
  if (static_cast<int>(e.dim()) != descriptor_.embedding_dim) {
    throw InvalidArgument("text tower produced dimension " + std::to_string(e.dim()) + ", expected " +
                          std::to_string(descriptor_.embedding_dim));
  }
  return e;
}

std::vector<std::vector<double>> OnnxClipBackend::token_states(std::string_view text) const {
  if (!supports_token_states()) return EmbeddingBackend::token_states(text);
  const cv::Mat blob = text_blob(text);
  cv::Mat out;
  {
    std::lock_guard lock(text_mutex_);
    text_net_.setInput(blob, options_.text_input);
    out = text_net_.forward(options_.hidden_output).clone();
  }
  // [1, context, hidden]; content token k sits at position k + 1 after the start marker.
  if (out.dims != 3) throw InvalidArgument("hidden-state output must be rank 3");
  const int positions = out.size[1];
  const int hidden = out.size[2];
  const std::size_t n = std::min<std::size_t>(tokenize(text).size(), static_cast<std::size_t>(positions - 2));
  std::vector<std::vector<double>> states(n, std::vector<double>(static_cast<std::size_t>(hidden)));
  const auto* data = out.ptr<float>();
  for (std::size_t k = 0; k < n; ++k) {
    const float* row = data + (k + 1) * static_cast<std::size_t>(hidden);
    std::copy(row, row + hidden, states[k].begin());
  }
  return states;
}

Embedding OnnxClipBackend::encode_image(const Image& image) const {
  const cv::Mat blob = preprocess_clip_image(image, options_.preprocess);
  cv::Mat out;
  {
    std::lock_guard lock(image_mutex_);
    image_net_.setInput(blob, options_.image_input);
    out = image_net_.forward(options_.image_output).clone();
  }
  return l2_normalized(row_to_vector(out));
}

}  // namespace vwsd
