#include "vwsd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "vwsd/errors.hpp"
#include "vwsd/text_util.hpp"

namespace vwsd {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrial: return "trial";
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kCustom: return "custom";
  }
  return "custom";
}

Split parse_split(std::string_view name) {
  if (name == "trial") return Split::kTrial;
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  if (name == "custom") return Split::kCustom;
  throw InvalidArgument("unknown split '" + std::string(name) + "'");
}

std::vector<std::string> validation_warnings(const Sample& sample) {
  std::vector<std::string> warnings;
  const auto tokens = split_whitespace(sample.context_phrase);
  const bool contained = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& tok) {
    return iequals(tok, sample.target_word);
  });
  if (!contained) {
    warnings.push_back("sample " + sample.id + ": target '" + sample.target_word +
                       "' is not a token of '" + sample.context_phrase + "'");
  }
  return warnings;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

bool looks_like_header(const std::vector<std::string>& fields) {
  if (fields.empty()) return false;
  const std::string first = to_lower(trim(fields.front()));
  return first == "word" || first == "target" || first == "target_word";
}

}  // namespace

SampleSet load_dataset(const std::filesystem::path& data_path, const std::filesystem::path& gold_path,
                       const std::filesystem::path& image_root, Split split) {
  std::vector<std::string> data_lines = read_lines(data_path);
  std::size_t first_line = 0;
  if (!data_lines.empty() && looks_like_header(split_on(data_lines.front(), '\t'))) {
    first_line = 1;
  }

  std::vector<std::string> gold_lines;
  const bool has_gold = !gold_path.empty();
  if (has_gold) {
    gold_lines = read_lines(gold_path);
    if (gold_lines.size() != data_lines.size() - first_line) {
      throw DatasetError("gold file has " + std::to_string(gold_lines.size()) + " lines but data file has " +
                         std::to_string(data_lines.size() - first_line) + " samples");
    }
  }

  SampleSet set;
  set.split = split;
  set.image_root = image_root;
  std::set<std::string> seen;

  for (std::size_t i = first_line; i < data_lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::vector<std::string> fields = split_on(data_lines[i], '\t');
    while (!fields.empty() && trim(fields.back()).empty()) fields.pop_back();
    if (fields.size() != 2 + kCandidatesPerSample) {
      throw DatasetError("expected 10 candidate images, found " +
                             std::to_string(fields.size() < 2 ? 0 : fields.size() - 2),
                         line_no);
    }

    Sample sample;
    sample.id = std::string(to_string(split)) + "_" + std::to_string(i - first_line);
    sample.target_word = trim(fields[0]);
    sample.context_phrase = trim(fields[1]);
    if (sample.target_word.empty()) throw DatasetError("empty target word", line_no);
    for (std::size_t c = 0; c < kCandidatesPerSample; ++c) {
      sample.candidates[c] = trim(fields[2 + c]);
      if (sample.candidates[c].empty()) throw DatasetError("empty candidate image name", line_no);
    }

    if (has_gold) {
      const std::string gold = trim(gold_lines[i - first_line]);
      const auto it = std::find(sample.candidates.begin(), sample.candidates.end(), gold);
      if (it == sample.candidates.end()) {
        throw DatasetError("gold image '" + gold + "' is not among the candidates", line_no);
      }
      sample.gold_index = static_cast<int>(it - sample.candidates.begin());
    }

    if (!seen.insert(sample.id).second) throw DatasetError("duplicate sample id " + sample.id, line_no);
    for (const std::string& w : validation_warnings(sample)) spdlog::warn("{}", w);
    set.samples.push_back(std::move(sample));
  }
  return set;
}

void save_dataset(const SampleSet& set, const std::filesystem::path& data_path,
                  const std::filesystem::path& gold_path) {
  std::ofstream data(data_path);
  if (!data) throw DatasetError("cannot write " + data_path.string());
  for (const Sample& s : set.samples) {
    data << s.target_word << '\t' << s.context_phrase;
    for (const std::string& c : s.candidates) data << '\t' << c;
    data << '\n';
  }

  const bool all_gold = std::all_of(set.samples.begin(), set.samples.end(),
                                    [](const Sample& s) { return s.gold_index.has_value(); });
  if (gold_path.empty() || !all_gold) return;
  std::ofstream gold(gold_path);
  if (!gold) throw DatasetError("cannot write " + gold_path.string());
  for (const Sample& s : set.samples) gold << s.candidates[static_cast<std::size_t>(*s.gold_index)] << '\n';
}

std::pair<SampleSet, SampleSet> split_train_validation(const SampleSet& set, double fraction,
                                                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  if (set.empty()) throw InvalidArgument("cannot split an empty sample set");

  const std::size_t n = set.size();
  // Guard against products like 10 * 0.8 landing a hair above an integer.
  const auto first_size = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_size));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(first_size), order.end());

  std::pair<SampleSet, SampleSet> parts;
  for (SampleSet* part : {&parts.first, &parts.second}) {
    part->split = Split::kCustom;
    part->image_root = set.image_root;
  }
  for (std::size_t k = 0; k < n; ++k) {
    (k < first_size ? parts.first : parts.second).samples.push_back(set.samples[order[k]]);
  }
  return parts;
}

}  // namespace vwsd
