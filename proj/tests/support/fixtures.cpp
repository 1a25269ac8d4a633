#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <unistd.h>

namespace vwsd::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Image noise_image(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img(rows, cols, CV_8UC3);
  for (int r = 0; r < rows; ++r) {
    auto* p = img.ptr<unsigned char>(r);
    for (int c = 0; c < cols * 3; ++c) p[c] = static_cast<unsigned char>(rng() & 0xff);
  }
  return img;
}

Image pattern_image(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int phase = static_cast<int>(rng() % 97);
  Image img(rows, cols, CV_8UC3);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      img.at<cv::Vec3b>(r, c) = cv::Vec3b(static_cast<unsigned char>((r * 255) / rows),
                                          static_cast<unsigned char>((c * 255) / cols),
                                          static_cast<unsigned char>((r + c + phase) % 256));
    }
  }
  const cv::Rect block(cols / 5, rows / 3, cols / 4, rows / 4);
  cv::rectangle(img, block, cv::Scalar(static_cast<double>(rng() % 256), 40, 200), cv::FILLED);
  return img;
}

std::vector<double> random_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = n(rng);
  return v;
}

Embedding random_unit(std::size_t dim, std::uint64_t seed) { return l2_normalized(random_vector(dim, seed)); }

namespace {

const std::vector<std::string> kTargets{"bank", "router", "mouse", "bat", "crane",
                                        "spring", "pitch", "club", "seal", "jaguar"};
const std::vector<std::string> kContexts{"erosion", "internet", "computer", "baseball", "construction",
                                         "season", "football", "golf", "arctic", "car", "river", "cave"};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

FixturePaths write_fixture(const fs::path& dir, const FixtureSpec& spec) {
  FixturePaths out;
  out.data = dir / "data.tsv";
  out.gold = dir / "gold.txt";
  out.images = dir / "images";
  out.aliases = dir / "aliases.tsv";
  fs::create_directories(out.images);

  std::mt19937_64 rng(spec.seed);
  std::ostringstream data;
  std::ostringstream gold;
  std::ostringstream aliases;
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const std::string& target = kTargets[rng() % kTargets.size()];
    const std::string& context = kContexts[rng() % kContexts.size()];
    const std::string phrase = (rng() % 2 == 0) ? context + " " + target : target + " " + context;
    const int gold_index = static_cast<int>(rng() % 10);
    out.targets.push_back(target);
    out.phrases.push_back(phrase);
    out.gold_indices.push_back(gold_index);

    data << target << '\t' << phrase;
    const bool missing = i < spec.missing_image_samples;
    for (int j = 0; j < 10; ++j) {
      const std::string name = "image." + std::to_string(spec.seed) + "." + std::to_string(i) + "." + std::to_string(j) + ".png";
      data << '\t' << name;
      if (!(missing && j == 0)) {
        const Image img = noise_image(spec.rows, spec.cols, spec.seed * 1000003ULL + i * 16 + static_cast<std::uint64_t>(j));
        cv::imwrite((out.images / name).string(), img);
      }
      if (j == gold_index) {
        gold << name << '\n';
        if (i < spec.rigged) aliases << "images/" << name << '\t' << phrase << '\n';
      }
    }
    data << '\n';
  }
  write_text(out.data, data.str());
  if (spec.write_gold) write_text(out.gold, gold.str());
  write_text(out.aliases, aliases.str());
  return out;
}

fs::path write_lexicon(const fs::path& dir) {
  const fs::path path = dir / "lexicon.tsv";
  write_text(path,
             "# word\tsynonyms\tglosses\n"
             "bank\tedge|depository|bank\tsloping land beside a body of water|a financial institution\n"
             "erosion\tdeterioration|eroding\tthe gradual wearing away of land|condition of being gradually worn away\n"
             "router\tdevice\ta device that forwards data packets|a tool for milling out grooves\n"
             "internet\tnet|web\ta global computer network\n"
             "mouse\trodent|computer mouse\tsmall rodent with a long tail|a hand-operated pointing device\n"
             "bat\tchiropteran|club\tnocturnal flying mammal|a club used for hitting a ball\n"
             "crane\tderrick\tlifting machine with a long arm|large long-necked wading bird\n"
             "edge\tborder\tthe boundary of a surface\n"
             "device\tgadget\tan instrumentality invented for a particular purpose\n");
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace vwsd::testing
