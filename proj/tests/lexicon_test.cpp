#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "support/fixtures.hpp"
#include "vwsd/errors.hpp"
#include "vwsd/lexicon.hpp"
#include "vwsd/mock_backend.hpp"
#include "vwsd/ranker.hpp"

using namespace vwsd;
using vwsd::testing::TempDir;

namespace {

FixtureLexicon bank_lexicon() {
  FixtureLexicon lex;
  lex.add("bank", {"edge", "depository", "Bank"}, {"sloping land beside water", "a financial institution"});
  lex.add("edge", {"border"}, {"the boundary of a surface"});
  lex.add("depository", {}, {"a facility where things are deposited", "a financial institution"});
  lex.add("solo", {"solo"}, {"a single performance"});
  lex.add("river_bank", {"riverbank"}, {"the bank of a river"});
  return lex;
}

std::vector<double> blend_oracle(const std::vector<double>& d, const std::vector<double>& t, double alpha) {
  std::vector<double> v(d.size());
  double n = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = alpha * d[i] + (1.0 - alpha) * t[i];
    n += v[i] * v[i];
  }
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

}  // namespace

TEST(FixtureLexicon, SynonymsExcludeTheWordItself) {
  const auto entry = bank_lexicon().find("bank");
  ASSERT_TRUE(entry.has_value());
  EXPECT_EQ(entry->synonyms, (std::vector<std::string>{"edge", "depository"}));
}

TEST(LookupSynonym, FirstDifferingLemma) {
  const FixtureLexicon lex = bank_lexicon();
  EXPECT_EQ(lookup_synonym(lex, "bank"), "edge");
  EXPECT_FALSE(lookup_synonym(lex, "zebra").has_value());
  EXPECT_FALSE(lookup_synonym(lex, "solo").has_value());
  EXPECT_THROW(lookup_synonym(lex, ""), InvalidArgument);
}

TEST(LookupEntry, MultiWordUsesUnderscoresThenHeadNoun) {
  const FixtureLexicon lex = bank_lexicon();
  EXPECT_EQ(lookup_synonym(lex, "river bank"), "riverbank");
  EXPECT_EQ(lookup_synonym(lex, "muddy bank"), "edge");
}

TEST(CandidateDefinitions, FlagOffGivesOwnGlosses) {
  const FixtureLexicon lex = bank_lexicon();
  EXPECT_EQ(candidate_definitions(lex, "bank", false),
            (std::vector<std::string>{"sloping land beside water", "a financial institution"}));
  EXPECT_EQ(candidate_definitions(lex, "bank", true, 0), candidate_definitions(lex, "bank", false));
  EXPECT_TRUE(candidate_definitions(lex, "zebra", true).empty());
}

TEST(CandidateDefinitions, SynonymGlossesAppendedAndDeduplicated) {
  FixtureLexicon lex;
  lex.add("w", {"s1", "s2", "s3"}, {"w gloss a", "w gloss b"});
  lex.add("s1", {}, {"s1 gloss"});
  lex.add("s2", {}, {"s2 gloss"});
  lex.add("s3", {}, {"s3 gloss"});
  EXPECT_EQ(candidate_definitions(lex, "w", true, 2),
            (std::vector<std::string>{"w gloss a", "w gloss b", "s1 gloss", "s2 gloss"}));
  const FixtureLexicon bank = bank_lexicon();
  EXPECT_EQ(candidate_definitions(bank, "bank", true, 2),
            (std::vector<std::string>{"sloping land beside water", "a financial institution", "the boundary of a surface",
                                      "a facility where things are deposited"}));
}

TEST(FixtureLexicon, LoadsFileFormat) {
  TempDir dir;
  const auto path = vwsd::testing::write_lexicon(dir.path());
  const FixtureLexicon lex = FixtureLexicon::load(path);
  EXPECT_EQ(lookup_synonym(lex, "bank"), "edge");
  EXPECT_EQ(lookup_synonym(lex, "erosion"), "deterioration");
  EXPECT_EQ(lex.version(), "fixture:lexicon.tsv");
  std::ofstream(dir / "bad.tsv") << "word\tonly two\n";
  EXPECT_THROW(FixtureLexicon::load(dir / "bad.tsv"), DatasetError);
  EXPECT_THROW(FixtureLexicon::load(dir / "missing.tsv"), DatasetError);
}

TEST(WordNetLexicon, ReadsDictionaryFormat) {
  TempDir dir;
  const std::string l1 = "00000001 17 n 03 bank 0 side 1 edge 0 000 | sloping land beside water; \"they sat on the bank\"\n";
  const std::string l2 = "00000002 06 n 02 depository_financial_institution 0 bank 0 000 | a financial institution\n";
  const std::string noun_data = "  1 license header line\n";
  const std::size_t off1 = noun_data.size();
  const std::size_t off2 = off1 + l1.size();
  std::ofstream(dir / "data.noun") << noun_data << l1 << l2;
  std::ofstream(dir / "index.noun") << "  1 license header line\n"
                                     << "bank n 2 1 @ 2 0 " << off1 << " " << off2 << "\n"
                                     << "edge n 1 0 1 0 " << off1 << "\n";
  const std::string adj = "00000000 00 s 01 steep(a) 0 000 | having a sharp inclination\n";
  std::ofstream(dir / "data.adj") << adj;
  std::ofstream(dir / "index.adj") << "steep a 1 0 1 0 0\n";
  for (const char* pos : {"verb", "adv"}) {
    std::ofstream(dir / (std::string("data.") + pos)) << "";
    std::ofstream(dir / (std::string("index.") + pos)) << "";
  }

  const WordNetLexicon wn(dir.path());
  const auto bank = wn.find("bank");
  ASSERT_TRUE(bank.has_value());
  EXPECT_EQ(bank->synonyms, (std::vector<std::string>{"side", "edge", "depository financial institution"}));
  EXPECT_EQ(bank->definitions, (std::vector<std::string>{"sloping land beside water", "a financial institution"}));
  EXPECT_EQ(lookup_synonym(wn, "bank"), "side");
  EXPECT_EQ(wn.find("steep")->definitions, (std::vector<std::string>{"having a sharp inclination"}));
  EXPECT_FALSE(wn.find("zebra").has_value());
  EXPECT_THROW(WordNetLexicon(dir / "missing"), DatasetError);
}

TEST(SelectDefinition, SingletonIsIndexZero) {
  const MockBackend backend;
  const std::vector<std::string> defs{"only definition"};
  EXPECT_EQ(select_definition(backend.encode_text("bank erosion"), defs, backend).index, 0u);
  EXPECT_THROW(select_definition(backend.encode_text("x"), std::vector<std::string>{}, backend), InvalidArgument);
}

TEST(SelectDefinition, IdenticalEmbeddingWins) {
  const MockBackend backend;
  const std::vector<std::string> defs{"a", "the river side", "c", "d"};
  const DefinitionChoice choice = select_definition(backend.encode_text("the river side"), defs, backend);
  EXPECT_EQ(choice.index, 1u);
  EXPECT_NEAR(choice.similarity, 1.0, 1e-12);
  EXPECT_EQ(choice.embedding, backend.encode_text("the river side"));
}

TEST(SelectDefinition, TiesGoToLowestIndex) {
  const MockBackend backend;
  const std::vector<std::string> defs{"x", "same", "same"};
  EXPECT_EQ(select_definition(backend.encode_text("same"), defs, backend).index, 1u);
}

TEST(SelectDefinition, MatchesExhaustiveScan) {
  const MockBackend backend(MockBackendOptions{.embedding_dim = 32});
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> defs;
    for (int i = 0; i < 5; ++i) defs.push_back("definition " + std::to_string(rng() % 50));
    const Embedding h = vwsd::testing::random_unit(32, rng());
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t i = 0; i < defs.size(); ++i) {
      const auto e = backend.encode_text(defs[i]).values;
      double s = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) s += e[k] * h.values[k];
      if (s > best_sim + 1e-15) {
        best_sim = s;
        best = i;
      }
    }
    const DefinitionChoice choice = select_definition(h, defs, backend);
    EXPECT_EQ(choice.index, best);
    EXPECT_NEAR(choice.similarity, best_sim, 1e-12);
  }
}

TEST(BlendDefinition, AlphaBoundariesReduceExactly) {
  const Embedding d = vwsd::testing::random_unit(64, 1);
  const Embedding t = vwsd::testing::random_unit(64, 2);
  EXPECT_EQ(blend_definition(d, t, 0.0).values, t.values);
  EXPECT_EQ(blend_definition(d, t, 1.0).values, d.values);
}

TEST(BlendDefinition, FifteenPercentOnOrthogonalVectors) {
  std::vector<double> a(8, 0.0);
  std::vector<double> b(8, 0.0);
  a[0] = 1.0;
  b[3] = 1.0;
  const Embedding got = blend_definition(l2_normalized(a), l2_normalized(b), 0.15);
  const double n = std::sqrt(0.15 * 0.15 + 0.85 * 0.85);
  EXPECT_NEAR(got.values[0], 0.15 / n, 1e-15);
  EXPECT_NEAR(got.values[3], 0.85 / n, 1e-15);
  EXPECT_NEAR(got.values[1], 0.0, 1e-15);
}

TEST(BlendDefinition, MatchesOracleAndStaysUnitNorm) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Embedding d = vwsd::testing::random_unit(48, rng());
    const Embedding t = vwsd::testing::random_unit(48, rng());
    const double alpha = static_cast<double>(rng() % 1001) / 1000.0;
    const Embedding got = blend_definition(d, t, alpha);
    EXPECT_TRUE(is_unit_norm(got));
    const auto expected = blend_oracle(d.values, t.values, alpha);
    for (std::size_t i = 0; i < expected.size(); ++i) ASSERT_NEAR(got.values[i], expected[i], 1e-12);
  }
}

TEST(BlendDefinition, Errors) {
  const Embedding d = vwsd::testing::random_unit(8, 1);
  Embedding neg = d;
  for (double& x : neg.values) x = -x;
  EXPECT_THROW(blend_definition(d, neg, 0.5), DegenerateEmbedding);
  EXPECT_THROW(blend_definition(d, d, 1.5), InvalidArgument);
  EXPECT_THROW(blend_definition(d, vwsd::testing::random_unit(4, 1), 0.5), InvalidArgument);
}
