#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vwsd/backend.hpp"
#include "vwsd/embedding.hpp"
#include "vwsd/image.hpp"

namespace vwsd {

/// Augmentation families, in the order their views are emitted.
enum class Strategy { kTta = 0, kGeometric, kPhotometric, kMulticrop, kGrid, kMidquadrant };

inline constexpr std::array<Strategy, 6> kStrategyOrder{Strategy::kTta,       Strategy::kGeometric,
                                                        Strategy::kPhotometric, Strategy::kMulticrop,
                                                        Strategy::kGrid,      Strategy::kMidquadrant};

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);
bool is_stochastic(Strategy strategy);

/// Number of distinct views a deterministic strategy can produce (tta 5, multicrop 4, grid 9,
/// midquadrant 4). Stochastic strategies cycle through their three transforms with fresh draws.
int max_views(Strategy strategy);

struct AugmentationProfile {
  /// Views per strategy, indexed by Strategy. Default split sums to 28.
  std::array<int, 6> strategy_counts{5, 3, 3, 4, 9, 4};
  std::uint64_t seed = 0;
  double rotation_min_degrees = -7.0;
  double rotation_max_degrees = 7.0;
  /// Jitter factors are drawn uniformly from [1 - s, 1 + s].
  double brightness = 0.2;
  double contrast = 0.2;
  double saturation = 0.2;
  int blur_radius = 1;
  double center_crop_fraction = 0.875;
  double zoom_fraction = 0.75;
  /// Random slight crop keeps a side fraction drawn from [slight_crop_min, 1].
  double slight_crop_min = 0.9;
  /// Views are emitted at this square resolution (the backend's input size).
  int output_size = 224;

  int count(Strategy s) const { return strategy_counts[static_cast<std::size_t>(s)]; }
  int total_views() const;

  /// Throws InvalidArgument on out-of-range parameters.
  void validate() const;

  /// Exactly one view: the original image resized.
  static AugmentationProfile single_view(int output_size = 224);
};

struct ViewLabel {
  Strategy strategy = Strategy::kTta;
  std::string params;
};

struct ViewSet {
  std::vector<Image> views;
  std::vector<ViewLabel> provenance;

  std::size_t size() const noexcept { return views.size(); }
};

/// Smallest image side accepted by generate_views.
inline constexpr int kMinImageSide = 32;
/// Grid patching needs at least this many pixels per patch side; smaller images fall back to copies.
inline constexpr int kMinGridPatchSide = 16;

/// Expands one image into the profile's views, in strategy order. Stochastic strategies draw from a
/// stream seeded by (profile.seed, image_key), so results vary across images but are reproducible.
/// Throws ImageError when the image is empty or smaller than kMinImageSide.
ViewSet generate_views(const Image& image, const AugmentationProfile& profile, std::string_view image_key = {});

/// Mean of the view embeddings, scaled by 1/tau, L2-normalized. Views that fail to encode are dropped
/// with a warning; if none survive the candidate fails with ImageError.
Embedding aggregate_image_embedding(const ViewSet& views, const EmbeddingBackend& backend, double tau);

/// Writes every view as PNG named "<index>_<strategy>_<k>.png". Returns the written paths.
std::vector<std::filesystem::path> dump_views(const ViewSet& views, const std::filesystem::path& dir);

}  // namespace vwsd
