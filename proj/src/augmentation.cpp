#include "vwsd/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/hashing.hpp"

namespace vwsd {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kTta: return "tta";
    case Strategy::kGeometric: return "geometric";
    case Strategy::kPhotometric: return "photometric";
    case Strategy::kMulticrop: return "multicrop";
    case Strategy::kGrid: return "grid";
    case Strategy::kMidquadrant: return "midquadrant";
  }
  return "tta";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kStrategyOrder) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown augmentation strategy '" + std::string(name) + "'");
}

bool is_stochastic(Strategy strategy) {
  return strategy == Strategy::kGeometric || strategy == Strategy::kPhotometric;
}

int max_views(Strategy strategy) {
  switch (strategy) {
    case Strategy::kTta: return 5;
    case Strategy::kMulticrop: return 4;
    case Strategy::kGrid: return 9;
    case Strategy::kMidquadrant: return 4;
    case Strategy::kGeometric:
    case Strategy::kPhotometric: return -1;
  }
  return -1;
}

int AugmentationProfile::total_views() const {
  return std::accumulate(strategy_counts.begin(), strategy_counts.end(), 0);
}

void AugmentationProfile::validate() const {
  for (Strategy s : kStrategyOrder) {
    const int n = count(s);
    if (n < 0) throw InvalidArgument(fmt::format("negative view count for {}", to_string(s)));
    if (max_views(s) >= 0 && n > max_views(s)) {
      throw InvalidArgument(fmt::format("{} produces at most {} views, requested {}", to_string(s), max_views(s), n));
    }
  }
  if (total_views() == 0) throw InvalidArgument("augmentation profile produces no views");
  if (rotation_min_degrees > rotation_max_degrees) throw InvalidArgument("rotation range is inverted");
  for (double s : {brightness, contrast, saturation}) {
    if (s < 0.0 || s >= 1.0) throw InvalidArgument("jitter strengths must lie in [0, 1)");
  }
  if (blur_radius < 0) throw InvalidArgument("blur radius must be non-negative");
  for (double f : {center_crop_fraction, zoom_fraction, slight_crop_min}) {
    if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("crop fractions must lie in (0, 1]");
  }
  if (output_size < 1) throw InvalidArgument("output size must be positive");
}

AugmentationProfile AugmentationProfile::single_view(int output_size) {
  AugmentationProfile p;
  p.strategy_counts = {1, 0, 0, 0, 0, 0};
  p.output_size = output_size;
  return p;
}

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(rng_.next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  SplitMix64 rng_;
};

Image crop_resize(const Image& src, const cv::Rect& rect, int size) {
  const cv::Rect clipped = rect & cv::Rect(0, 0, src.cols, src.rows);
  return resize_square(src(clipped), size);
}

cv::Rect centered(const Image& src, double fraction) {
  const int w = std::max(1, static_cast<int>(std::lround(src.cols * fraction)));
  const int h = std::max(1, static_cast<int>(std::lround(src.rows * fraction)));
  return {(src.cols - w) / 2, (src.rows - h) / 2, w, h};
}

Image to_gray3(const Image& bgr) {
  Image gray;
  Image out;
  cv::cvtColor(bgr, gray, cv::COLOR_BGR2GRAY);
  cv::cvtColor(gray, out, cv::COLOR_GRAY2BGR);
  return out;
}

// Blend towards `anchor`: anchor + factor * (img - anchor), saturated to 8 bits.
Image blend(const Image& img, const cv::Mat& anchor, double factor) {
  cv::Mat f_img;
  cv::Mat f_anchor;
  img.convertTo(f_img, CV_32FC3);
  anchor.convertTo(f_anchor, CV_32FC3);
  cv::Mat mixed = f_anchor + (f_img - f_anchor) * factor;
  Image out;
  mixed.convertTo(out, CV_8UC3);
  return out;
}

void tta_views(const Image& src, const Image& base, const AugmentationProfile& p, ViewSet& out) {
  const int n = p.count(Strategy::kTta);
  for (int k = 0; k < n; ++k) {
    Image v;
    std::string params;
    switch (k) {
      case 0: v = base.clone(); params = "original"; break;
      case 1: cv::flip(base, v, 1); params = "mirror"; break;
      case 2:
        v = crop_resize(src, centered(src, p.center_crop_fraction), p.output_size);
        params = fmt::format("center_crop={:.3f}", p.center_crop_fraction);
        break;
      case 3:
        v = crop_resize(src, centered(src, p.zoom_fraction), p.output_size);
        params = fmt::format("zoom={:.3f}", p.zoom_fraction);
        break;
      default: v = to_gray3(base); params = "grayscale"; break;
    }
    out.views.push_back(std::move(v));
    out.provenance.push_back({Strategy::kTta, std::move(params)});
  }
}

void geometric_views(const Image& src, const Image& base, const AugmentationProfile& p, Uniform& rng,
                     ViewSet& out) {
  const int n = p.count(Strategy::kGeometric);
  for (int k = 0; k < n; ++k) {
    Image v;
    std::string params;
    switch (k % 3) {
      case 0: {
        const bool flip = rng(0.0, 1.0) < 0.5;
        if (flip) {
          cv::flip(base, v, 1);
        } else {
          v = base.clone();
        }
        params = fmt::format("flip={}", flip);
        break;
      }
      case 1: {
        const double angle = rng(p.rotation_min_degrees, p.rotation_max_degrees);
        const cv::Point2f center(static_cast<float>(base.cols) / 2.0F, static_cast<float>(base.rows) / 2.0F);
        const cv::Mat m = cv::getRotationMatrix2D(center, angle, 1.0);
        cv::warpAffine(base, v, m, base.size(), cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
        params = fmt::format("rotation={:.4f}", angle);
        break;
      }
      default: {
        const double frac = rng(p.slight_crop_min, 1.0);
        const int w = std::max(1, static_cast<int>(std::lround(src.cols * frac)));
        const int h = std::max(1, static_cast<int>(std::lround(src.rows * frac)));
        const int x = static_cast<int>(std::floor(rng(0.0, 1.0) * (src.cols - w + 1)));
        const int y = static_cast<int>(std::floor(rng(0.0, 1.0) * (src.rows - h + 1)));
        v = crop_resize(src, {x, y, w, h}, p.output_size);
        params = fmt::format("crop={:.4f}@{},{}", frac, x, y);
        break;
      }
    }
    out.views.push_back(std::move(v));
    out.provenance.push_back({Strategy::kGeometric, std::move(params)});
  }
}

void photometric_views(const Image& base, const AugmentationProfile& p, Uniform& rng, ViewSet& out) {
  const int n = p.count(Strategy::kPhotometric);
  for (int k = 0; k < n; ++k) {
    Image v;
    std::string params;
    switch (k % 3) {
      case 0: {
        const double factor = rng(1.0 - p.brightness, 1.0 + p.brightness);
        v = blend(base, cv::Mat::zeros(base.size(), base.type()), factor);
        params = fmt::format("brightness={:.4f}", factor);
        break;
      }
      case 1: {
        const double c = rng(1.0 - p.contrast, 1.0 + p.contrast);
        const double s = rng(1.0 - p.saturation, 1.0 + p.saturation);
        const Image gray = to_gray3(base);
        const cv::Scalar mean = cv::mean(gray);
        const Image contrasted = blend(base, cv::Mat(base.size(), base.type(), mean), c);
        v = blend(contrasted, to_gray3(contrasted), s);
        params = fmt::format("contrast={:.4f},saturation={:.4f}", c, s);
        break;
      }
      default: {
        const int ksize = 2 * p.blur_radius + 1;
        cv::GaussianBlur(base, v, cv::Size(ksize, ksize), 0.0);
        params = fmt::format("blur_radius={}", p.blur_radius);
        break;
      }
    }
    out.views.push_back(std::move(v));
    out.provenance.push_back({Strategy::kPhotometric, std::move(params)});
  }
}

void quadrant_views(const Image& src, const AugmentationProfile& p, ViewSet& out) {
  const int w0 = src.cols / 2;
  const int h0 = src.rows / 2;
  const std::array<cv::Rect, 4> rects{cv::Rect{0, 0, w0, h0}, cv::Rect{w0, 0, src.cols - w0, h0},
                                      cv::Rect{0, h0, w0, src.rows - h0},
                                      cv::Rect{w0, h0, src.cols - w0, src.rows - h0}};
  constexpr std::array<std::string_view, 4> names{"top_left", "top_right", "bottom_left", "bottom_right"};
  for (int k = 0; k < p.count(Strategy::kMulticrop); ++k) {
    out.views.push_back(crop_resize(src, rects[static_cast<std::size_t>(k)], p.output_size));
    out.provenance.push_back({Strategy::kMulticrop, std::string(names[static_cast<std::size_t>(k)])});
  }
}

void grid_views(const Image& src, const Image& base, const AugmentationProfile& p, std::string_view key,
                ViewSet& out) {
  const int n = p.count(Strategy::kGrid);
  if (n == 0) return;
  if (std::min(src.cols, src.rows) < 3 * kMinGridPatchSide) {
    spdlog::warn("image {} is too small for 3x3 grid patches ({}x{}); using whole-image copies", key, src.cols,
                 src.rows);
    for (int k = 0; k < n; ++k) {
      out.views.push_back(base.clone());
      out.provenance.push_back({Strategy::kGrid, "fallback_copy"});
    }
    return;
  }
  for (int k = 0; k < n; ++k) {
    const int row = k / 3;
    const int col = k % 3;
    const int x0 = col * src.cols / 3;
    const int x1 = (col + 1) * src.cols / 3;
    const int y0 = row * src.rows / 3;
    const int y1 = (row + 1) * src.rows / 3;
    out.views.push_back(crop_resize(src, {x0, y0, x1 - x0, y1 - y0}, p.output_size));
    out.provenance.push_back({Strategy::kGrid, fmt::format("patch_r{}c{}", row, col)});
  }
}

void midquadrant_views(const Image& src, const AugmentationProfile& p, ViewSet& out) {
  const int w = src.cols / 2;
  const int h = src.rows / 2;
  const std::array<cv::Rect, 4> rects{cv::Rect{0, (src.rows - h) / 2, w, h},
                                      cv::Rect{src.cols - w, (src.rows - h) / 2, w, h},
                                      cv::Rect{(src.cols - w) / 2, 0, w, h},
                                      cv::Rect{(src.cols - w) / 2, src.rows - h, w, h}};
  constexpr std::array<std::string_view, 4> names{"left", "right", "top", "bottom"};
  for (int k = 0; k < p.count(Strategy::kMidquadrant); ++k) {
    out.views.push_back(crop_resize(src, rects[static_cast<std::size_t>(k)], p.output_size));
    out.provenance.push_back({Strategy::kMidquadrant, std::string(names[static_cast<std::size_t>(k)])});
  }
}

}  // namespace

ViewSet generate_views(const Image& image, const AugmentationProfile& profile, std::string_view image_key) {
  profile.validate();
  const std::string key = image_key.empty() ? std::string("<memory>") : std::string(image_key);
  if (image.empty()) throw ImageError(key, "empty image");
  if (std::min(image.rows, image.cols) < kMinImageSide) {
    throw ImageError(key, fmt::format("image is {}x{}, minimum side is {}", image.cols, image.rows, kMinImageSide));
  }

  const Image base = resize_square(image, profile.output_size);
  std::uint64_t seed_state = kFnvOffsetBasis;
  for (int shift = 0; shift < 64; shift += 8) {
    const auto byte = static_cast<unsigned char>((profile.seed >> shift) & 0xFF);
    seed_state = fnv1a64(std::span<const unsigned char>(&byte, 1), seed_state);
  }
  Uniform rng(fnv1a64(image_key, seed_state));

  ViewSet out;
  out.views.reserve(static_cast<std::size_t>(profile.total_views()));
  tta_views(image, base, profile, out);
  geometric_views(image, base, profile, rng, out);
  photometric_views(base, profile, rng, out);
  quadrant_views(image, profile, out);
  grid_views(image, base, profile, key, out);
  midquadrant_views(image, profile, out);
  return out;
}

Embedding aggregate_image_embedding(const ViewSet& views, const EmbeddingBackend& backend, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("temperature must be a positive finite number");
  if (views.views.empty()) throw InvalidArgument("cannot aggregate an empty view set");

  std::vector<Embedding> embedded;
  embedded.reserve(views.size());
  std::string last_error;
  for (std::size_t i = 0; i < views.size(); ++i) {
    try {
      embedded.push_back(backend.encode_image(views.views[i]));
    } catch (const Error& e) {
      last_error = e.what();
      spdlog::warn("dropping view {} ({}): {}", i, to_string(views.provenance[i].strategy), e.what());
    }
  }
  if (embedded.empty()) throw ImageError("<views>", "every view failed to encode: " + last_error);

  std::vector<double> mean = mean_of(embedded);
  const double inv_tau = 1.0 / tau;
  for (double& x : mean) x *= inv_tau;
  return l2_normalized(std::move(mean));
}

std::vector<std::filesystem::path> dump_views(const ViewSet& views, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  std::array<int, 6> per_strategy{};
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Strategy s = views.provenance[i].strategy;
    const int k = per_strategy[static_cast<std::size_t>(s)]++;
    const auto path = dir / fmt::format("{:02d}_{}_{}.png", i, to_string(s), k);
    if (!cv::imwrite(path.string(), views.views[i])) throw ImageError(path.string(), "cannot write view");
    written.push_back(path);
  }
  return written;
}

}  // namespace vwsd
