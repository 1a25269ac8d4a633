#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "support/fixtures.hpp"
#include "vwsd/errors.hpp"
#include "vwsd/mock_backend.hpp"
#include "vwsd/prompts.hpp"
#include "vwsd/text_util.hpp"

using namespace vwsd;

namespace {

std::vector<double> mean_then_normalize(const std::vector<Embedding>& es) {
  std::vector<double> m(es.front().dim(), 0.0);
  for (const Embedding& e : es) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += e.values[i];
  }
  double n = 0.0;
  for (double& x : m) {
    x /= static_cast<double>(es.size());
    n += x * x;
  }
  for (double& x : m) x /= std::sqrt(n);
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

class FixedTranslator final : public Translator {
 public:
  explicit FixedTranslator(std::string out) : out_(std::move(out)) {}
  std::string translate(std::string_view, std::string_view) const override { return out_; }

 private:
  std::string out_;
};

class IdentityTranslator final : public Translator {
 public:
  std::string translate(std::string_view text, std::string_view) const override { return std::string(text); }
};

}  // namespace

TEST(SemanticPrompts, BankErosion) {
  EXPECT_EQ(build_semantic_prompts("bank", "erosion"),
            (std::vector<std::string>{"bank related to erosion", "the concept of bank in erosion",
                                      "bank in the context of erosion"}));
}

TEST(SemanticPrompts, DeterministicOrderAndMentionTarget) {
  const auto a = build_semantic_prompts("router", "internet");
  EXPECT_EQ(a, build_semantic_prompts("router", "internet"));
  ASSERT_EQ(a.size(), 3u);
  for (const std::string& p : a) EXPECT_NE(p.find("router"), std::string::npos);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], replace_all(replace_all(PromptTemplates{}.semantic[i], "{t}", "router"), "{c}", "internet"));
  }
}

TEST(SemanticPrompts, RejectsEmptyInputs) {
  EXPECT_THROW(build_semantic_prompts("", "erosion"), InvalidArgument);
  EXPECT_THROW(build_semantic_prompts("bank", ""), InvalidArgument);
}

TEST(PhotoPrompts, SynonymPromptIncluded) {
  const auto prompts = build_photo_prompts("bank", "erosion", SynonymPair{"edge", "deterioration"});
  EXPECT_NE(std::find(prompts.begin(), prompts.end(), "a photo of edge deterioration"), prompts.end());
  EXPECT_EQ(prompts.front(), "a photo of bank erosion");
}

TEST(PhotoPrompts, NoSynonymsLeavesBaseList) {
  EXPECT_EQ(build_photo_prompts("bank", "erosion", std::nullopt),
            (std::vector<std::string>{"a photo of bank erosion", "bank with erosion, natural scene",
                                      "bank appearing in a erosion environment"}));
}

TEST(PhotoPrompts, LengthIsBasePlusSynonymTemplates) {
  PromptTemplates t;
  t.synonym_photo.push_back("{t_syn} near {c_syn}");
  t.photo.push_back("{c} {t}");
  EXPECT_EQ(build_photo_prompts("bank", "erosion", std::nullopt, t).size(), t.photo.size());
  EXPECT_EQ(build_photo_prompts("bank", "erosion", SynonymPair{"edge", "deterioration"}, t).size(),
            t.photo.size() + t.synonym_photo.size());
}

TEST(PromptBundle, ProvenanceAndInvariants) {
  const PromptBundle b = build_prompt_bundle("bank", "erosion", SynonymPair{"edge", "deterioration"});
  EXPECT_EQ(b.semantic_prompts.size(), 3u);
  EXPECT_EQ(b.photo_prompts.size(), 3u);
  EXPECT_EQ(b.synonym_photo_prompts, (std::vector<std::string>{"a photo of edge deterioration"}));
  EXPECT_EQ(b.provenance, (std::vector<std::string>{"semantic/0", "semantic/1", "semantic/2", "photo/0", "photo/1",
                                                    "photo/2", "synonym_photo/0"}));
  EXPECT_EQ(b.photo_channel().size(), 4u);
  for (const std::string& p : b.semantic_prompts) EXPECT_NE(p.find("bank"), std::string::npos);
  for (const std::string& p : b.synonym_photo_prompts) EXPECT_NE(p.find("edge"), std::string::npos);
}

TEST(ContextWithoutTarget, RemovesTargetToken) {
  EXPECT_EQ(context_without_target("bank erosion", "bank"), "erosion");
  EXPECT_EQ(context_without_target("internet router", "router"), "internet");
  EXPECT_EQ(context_without_target("Router internet access", "router"), "internet access");
  EXPECT_EQ(context_without_target("bank", "bank"), "bank");
}

TEST(Templates, LoadFromFile) {
  vwsd::testing::TempDir dir;
  std::ofstream(dir / "t.txt") << "{t} seen in {c}\n\n  a picture of {t}  \n";
  EXPECT_EQ(PromptTemplates::load_file(dir / "t.txt"), (std::vector<std::string>{"{t} seen in {c}", "a picture of {t}"}));
  std::ofstream(dir / "empty.txt") << "\n";
  EXPECT_THROW(PromptTemplates::load_file(dir / "empty.txt"), InvalidArgument);
  EXPECT_THROW(PromptTemplates::load_file(dir / "missing.txt"), InvalidArgument);
}

TEST(ChannelEmbedding, OnePromptEqualsEncodeText) {
  const MockBackend backend;
  const std::vector<std::string> one{"a photo of bank erosion"};
  EXPECT_LT(max_abs_diff(channel_embedding(one, backend).values, backend.encode_text(one[0]).values), 1e-12);
  const std::vector<std::string> twice{one[0], one[0]};
  EXPECT_LT(max_abs_diff(channel_embedding(twice, backend).values, backend.encode_text(one[0]).values), 1e-12);
}

TEST(ChannelEmbedding, ThreePromptsMatchMeanThenNormalize) {
  const MockBackend backend;
  const std::vector<std::string> prompts = build_semantic_prompts("bank", "erosion");
  std::vector<Embedding> es;
  for (const auto& p : prompts) es.push_back(backend.encode_text(p));
  const Embedding got = channel_embedding(prompts, backend);
  EXPECT_LT(max_abs_diff(got.values, mean_then_normalize(es)), 1e-12);
  EXPECT_TRUE(is_unit_norm(got));
}

TEST(ChannelEmbedding, PermutationInvariant) {
  const MockBackend backend;
  std::vector<std::string> prompts{"p one", "p two", "p three", "p four", "p five"};
  const Embedding base = channel_embedding(prompts, backend);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(prompts.begin(), prompts.end(), rng);
    EXPECT_LT(max_abs_diff(channel_embedding(prompts, backend).values, base.values), 1e-12);
  }
  EXPECT_THROW(channel_embedding(std::vector<std::string>{}, backend), InvalidArgument);
}

TEST(FuseChannels, CollinearInputsReturnInput) {
  const Embedding h = vwsd::testing::random_unit(64, 1);
  for (const FusionWeights w : {FusionWeights{0.5, 0.5}, FusionWeights{0.1, 0.9}, FusionWeights{1.0, 0.0}}) {
    EXPECT_LT(max_abs_diff(fuse_channels(h, h, w).values, h.values), 1e-12);
  }
}

TEST(FuseChannels, ZeroSemanticWeightReturnsPhotoChannel) {
  const Embedding hp = vwsd::testing::random_unit(64, 1);
  const Embedding hs = vwsd::testing::random_unit(64, 2);
  EXPECT_LT(max_abs_diff(fuse_channels(hp, hs, {0.6, 0.0}).values, hp.values), 1e-12);
}

TEST(FuseChannels, ScaleInvariance) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Embedding hp = vwsd::testing::random_unit(128, 2 * seed);
    const Embedding hs = vwsd::testing::random_unit(128, 2 * seed + 1);
    const FusionWeights w{0.08, 0.04};
    const Embedding base = fuse_channels(hp, hs, w);
    for (double c : {0.5, 2.0, 10.0}) {
      EXPECT_LT(max_abs_diff(fuse_channels(hp, hs, {c * w.beta_p, c * w.beta_s}).values, base.values), 1e-12);
    }
  }
}

TEST(FuseChannels, MatchesWeightedSumOracle) {
  const Embedding hp = vwsd::testing::random_unit(32, 7);
  const Embedding hs = vwsd::testing::random_unit(32, 8);
  std::vector<double> expected(32);
  double n = 0.0;
  for (std::size_t i = 0; i < 32; ++i) {
    expected[i] = 0.7685 * hp.values[i] + 0.6152 * hs.values[i];
    n += expected[i] * expected[i];
  }
  for (double& x : expected) x /= std::sqrt(n);
  const Embedding got = fuse_channels(hp, hs, {0.7685, 0.6152});
  EXPECT_LT(max_abs_diff(got.values, expected), 1e-12);
  EXPECT_TRUE(got.normalized);
}

TEST(FuseChannels, AntiparallelEqualWeightsIsDegenerate) {
  const Embedding h = vwsd::testing::random_unit(16, 3);
  Embedding neg = h;
  for (double& x : neg.values) x = -x;
  EXPECT_THROW(fuse_channels(h, neg, {0.5, 0.5}), DegenerateEmbedding);
}

TEST(FuseChannels, RejectsInvalidWeights) {
  const Embedding h = vwsd::testing::random_unit(16, 3);
  EXPECT_THROW(fuse_channels(h, h, {0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(fuse_channels(h, h, {1.5, 0.2}), InvalidArgument);
  EXPECT_THROW(fuse_channels(h, h, {-0.1, 0.2}), InvalidArgument);
  EXPECT_THROW(fuse_channels(h, vwsd::testing::random_unit(8, 1), {0.5, 0.5}), InvalidArgument);
}

TEST(Multilingual, EmptyLanguageListEqualsChannel) {
  const MockBackend backend;
  const auto prompts = build_photo_prompts("bank", "erosion", std::nullopt);
  const FixedTranslator t("x");
  EXPECT_LT(max_abs_diff(multilingual_channel_embedding(prompts, {}, t, backend).values,
                         channel_embedding(prompts, backend).values),
            1e-12);
}

TEST(Multilingual, IdentityTranslationDoesNotMoveTheMean) {
  const MockBackend backend;
  const auto prompts = build_photo_prompts("bank", "erosion", std::nullopt);
  const std::vector<std::string> langs{"es"};
  EXPECT_LT(max_abs_diff(multilingual_channel_embedding(prompts, langs, IdentityTranslator{}, backend).values,
                         channel_embedding(prompts, backend).values),
            1e-12);
}

TEST(Multilingual, FixedTranslationIsTwoGroupMean) {
  const MockBackend backend;
  const auto prompts = build_semantic_prompts("bank", "erosion");
  const std::vector<std::string> langs{"fr"};
  const Embedding got = multilingual_channel_embedding(prompts, langs, FixedTranslator("rive"), backend);
  // Equal group sizes: the pooled mean equals the mean of the two group means.
  std::vector<Embedding> english;
  for (const auto& p : prompts) english.push_back(backend.encode_text(p));
  std::vector<double> group_mean(english[0].dim(), 0.0);
  for (const auto& e : english) {
    for (std::size_t i = 0; i < group_mean.size(); ++i) group_mean[i] += e.values[i] / 3.0;
  }
  const Embedding x = backend.encode_text("rive");
  std::vector<double> expected(group_mean.size());
  double n = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    expected[i] = (group_mean[i] + x.values[i]) / 2.0;
    n += expected[i] * expected[i];
  }
  for (double& v : expected) v /= std::sqrt(n);
  EXPECT_LT(max_abs_diff(got.values, expected), 1e-12);

  // One prompt: the two channel embeddings are themselves unit vectors.
  const std::vector<std::string> one{"a photo of bank erosion"};
  const Embedding single = multilingual_channel_embedding(one, langs, FixedTranslator("rive"), backend);
  const Embedding ce = channel_embedding(one, backend);
  std::vector<double> two(ce.dim());
  for (std::size_t i = 0; i < two.size(); ++i) two[i] = (ce.values[i] + x.values[i]) / 2.0;
  EXPECT_LT(max_abs_diff(single.values, l2_normalized(two).values), 1e-12);
}

TEST(Multilingual, FailingLanguageIsSkipped) {
  const MockBackend backend;
  TableTranslator table;
  const auto prompts = build_semantic_prompts("bank", "erosion");
  for (const auto& p : prompts) table.add("es", p, "es: " + p);
  const std::vector<std::string> both{"es", "de"};
  const std::vector<std::string> es{"es"};
  EXPECT_EQ(multilingual_channel_embedding(prompts, both, table, backend),
            multilingual_channel_embedding(prompts, es, table, backend));
}

TEST(TableTranslator, LoadsTsv) {
  vwsd::testing::TempDir dir;
  std::ofstream(dir / "tr.tsv") << "es\ta photo of bank erosion\tuna foto de erosion del banco\n";
  const TableTranslator t = TableTranslator::load(dir / "tr.tsv");
  EXPECT_EQ(t.translate("a photo of bank erosion", "es"), "una foto de erosion del banco");
  EXPECT_THROW(t.translate("a photo of bank erosion", "fr"), InvalidArgument);
  std::ofstream(dir / "bad.tsv") << "es\tonly two\n";
  EXPECT_THROW(TableTranslator::load(dir / "bad.tsv"), DatasetError);
}

TEST(PromptProperties, OutputsAreUnitNorm) {
  const MockBackend backend(MockBackendOptions{.embedding_dim = 64});
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> prompts;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) prompts.push_back("prompt " + std::to_string(rng()));
    EXPECT_TRUE(is_unit_norm(channel_embedding(prompts, backend)));
    const std::vector<std::string> langs{"de"};
    EXPECT_TRUE(is_unit_norm(multilingual_channel_embedding(prompts, langs, FixedTranslator(std::to_string(rng())), backend)));
  }
}
