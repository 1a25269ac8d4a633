#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vwsd {

inline constexpr std::size_t kCandidatesPerSample = 10;

enum class Split { kTrial, kTrain, kTest, kCustom };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

/// One disambiguation instance: a target word in a short context and ten candidate images.
struct Sample {
  std::string id;
  std::string target_word;
  std::string context_phrase;
  /// Paths relative to the owning SampleSet's image_root.
  std::array<std::string, kCandidatesPerSample> candidates;
  std::optional<int> gold_index;

  bool operator==(const Sample&) const = default;
};

struct SampleSet {
  std::vector<Sample> samples;
  Split split = Split::kCustom;
  std::filesystem::path image_root;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  std::filesystem::path resolve(const std::string& image_ref) const { return image_root / image_ref; }
};

/// Non-fatal problems with a sample (target word not a token of the context phrase).
std::vector<std::string> validation_warnings(const Sample& sample);

/// Loads a tab-separated data file (word, phrase, image_1..image_10) and an optional gold file
/// with one image filename per line. An empty `gold_path` leaves gold indices unset.
/// Throws DatasetError naming the offending line on malformed input.
SampleSet load_dataset(const std::filesystem::path& data_path, const std::filesystem::path& gold_path,
                       const std::filesystem::path& image_root, Split split = Split::kCustom);

/// Writes `set` back in the same format. The gold file is written only when every sample has a gold index.
void save_dataset(const SampleSet& set, const std::filesystem::path& data_path,
                  const std::filesystem::path& gold_path);

/// Deterministic disjoint partition into (first, second) with ⌈N·fraction⌉ samples in the first part.
/// Both parts keep the input order.
std::pair<SampleSet, SampleSet> split_train_validation(const SampleSet& set, double fraction,
                                                       std::uint64_t seed);

}  // namespace vwsd
