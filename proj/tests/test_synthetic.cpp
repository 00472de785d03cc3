#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reqfuse/hash.hpp"
#include "reqfuse/synthetic.hpp"
#include "reqfuse/textrep.hpp"

using namespace reqfuse;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Synthetic, ShapeAndLabels) {
  const auto c = make_synthetic({});
  EXPECT_EQ(c.dataset.size(), 400u);
  EXPECT_EQ(c.dataset.positive_class(), PairLabel::Duplicate);
  EXPECT_EQ(c.dataset.count(PairLabel::Duplicate), 120u);
  EXPECT_EQ(c.dataset.count(PairLabel::Neutral), 280u);
  // ten similarity scores and eight CLS vectors per pair
  EXPECT_EQ(c.store.size(), 400u * 18u);
  for (auto m : kClsModels) EXPECT_EQ(c.store.cls_dim(m), 16u);
}

TEST(Synthetic, DuplicatesShareVocabularyNeutralsDoNot) {
  const auto c = make_synthetic({});
  double dup = 0.0, neu = 0.0;
  for (const auto& p : c.dataset.pairs()) {
    const double o = token_overlap(p.left.text, p.right.text);
    (p.label == PairLabel::Duplicate ? dup : neu) += o;
  }
  dup /= 120.0;
  neu /= 280.0;
  EXPECT_GT(dup, neu + 0.3);
}

TEST(Synthetic, DuplicateIsSynonymRewriteAndShuffle) {
  const auto c = make_synthetic({});
  int reordered = 0;
  for (const auto& p : c.dataset.pairs()) {
    if (p.label != PairLabel::Duplicate) continue;
    const auto a = tokenize(p.left.text);
    const auto b = tokenize(p.right.text);
    reordered += a != b;
  }
  EXPECT_EQ(reordered, 120);
}

TEST(Synthetic, ScoresTrackOverlap) {
  const auto c = make_synthetic({});
  for (auto m : kSimModels) {
    double dup = 0.0, neu = 0.0;
    for (const auto& p : c.dataset.pairs()) {
      const double s = *c.store.sim(p.pair_id, m);
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      (p.label == PairLabel::Duplicate ? dup : neu) += s;
    }
    EXPECT_GT(dup / 120.0, neu / 280.0) << to_string(m);
  }
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticOptions a;
  a.pairs = 50;
  const auto x = make_synthetic(a);
  const auto y = make_synthetic(a);
  EXPECT_EQ(format_pairs(x.dataset), format_pairs(y.dataset));
  EXPECT_EQ(format_store(x.store), format_store(y.store));
  a.seed = 8;
  EXPECT_NE(format_pairs(make_synthetic(a).dataset), format_pairs(x.dataset));
}

TEST(Synthetic, CheckedInFixtureMatchesGenerator) {
  const std::filesystem::path dir(REQFUSE_FIXTURE_DIR);
  const auto c = make_synthetic({});
  EXPECT_EQ(format_pairs(c.dataset), slurp(dir / "synthetic.csv"));
  EXPECT_EQ(sha256_hex(format_store(c.store)), sha256_file((dir / "synthetic_store.jsonl").string()));
}
