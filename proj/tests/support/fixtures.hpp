#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vwsd/embedding.hpp"
#include "vwsd/image.hpp"

namespace vwsd::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vwsd");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Deterministic noise image; distinct seeds give distinct pixels.
Image noise_image(int rows, int cols, std::uint64_t seed);

/// Deterministic image with smooth structure (gradients plus a block), so crops differ visibly.
Image pattern_image(int rows, int cols, std::uint64_t seed);

/// Random unit vector drawn with std::mt19937_64 (independent of the library's generators).
Embedding random_unit(std::size_t dim, std::uint64_t seed);
std::vector<double> random_vector(std::size_t dim, std::uint64_t seed);

struct FixtureSpec {
  std::size_t samples = 3;
  std::uint64_t seed = 1;
  int rows = 48;
  int cols = 64;
  /// Samples [0, rigged) get a gold image aliased to the context phrase, so the vanilla pipeline ranks it first.
  std::size_t rigged = 0;
  /// Samples whose first candidate file is missing from disk.
  std::size_t missing_image_samples = 0;
  bool write_gold = true;
};

struct FixturePaths {
  std::filesystem::path data;
  std::filesystem::path gold;
  std::filesystem::path images;
  std::filesystem::path aliases;
  std::vector<std::string> targets;
  std::vector<std::string> phrases;
  std::vector<int> gold_indices;
};

/// Writes data.tsv, gold.txt, images/ and aliases.tsv under `dir`.
FixturePaths write_fixture(const std::filesystem::path& dir, const FixtureSpec& spec);

/// Writes a small lexicon fixture covering the fixture vocabulary.
std::filesystem::path write_lexicon(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);

}  // namespace vwsd::testing
