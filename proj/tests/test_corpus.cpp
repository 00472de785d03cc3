#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "oracles.hpp"
#include "reqfuse/corpus.hpp"
#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"

using namespace reqfuse;

namespace {

std::string pairs_csv(const std::vector<std::string>& labels) {
  std::string text = "pair_id,req1_id,req1_text,req2_id,req2_text,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto n = std::to_string(i);
    text += "p" + n + ",a" + n + ",left " + n + ",b" + n + ",right " + n + "," + labels[i] + "\n";
  }
  return text;
}

PairDataset make_dataset(std::size_t neutral, std::size_t positive, PairLabel pos = PairLabel::Conflict) {
  const std::size_t n = neutral + positive;
  std::vector<RequirementPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    RequirementPair p;
    p.pair_id = "p" + std::to_string(i);
    p.left = {"l" + std::to_string(i), "left"};
    p.right = {"r" + std::to_string(i), "right"};
    // spreads the positives evenly so positional order is not label order
    p.label = (i + 1) * positive / n > i * positive / n ? pos : PairLabel::Neutral;
    pairs.push_back(p);
  }
  return PairDataset("toy", std::move(pairs));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no reqfuse::Error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(Csv, QuotedFieldsRoundTrip) {
  const std::string text = "a,\"b,c\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",,x\n";
  const auto rows = csv::parse(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (csv::Row{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(rows[1], (csv::Row{"multi\nline", "", "x"}));
  EXPECT_EQ(csv::format_row(rows[0]), "a,\"b,c\",\"say \"\"hi\"\"\"");
}

TEST(Csv, StrayQuoteIsMalformed) {
  EXPECT_EQ(code_of([] { csv::parse("a,b\"c\n"); }), ErrorCode::MalformedRecord);
}

TEST(Csv, DoublesRoundTripBitExactly) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal(0.0, 1e3) * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
  }
}

TEST(LoadPairs, ThreeRowsMapLabels) {
  const auto ds = parse_pairs(pairs_csv({"neutral", "conflict", "NEUTRAL"}));
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.positive_class(), PairLabel::Conflict);
  EXPECT_EQ(ds[0].label, PairLabel::Neutral);
  EXPECT_EQ(ds[1].label, PairLabel::Conflict);
  EXPECT_EQ(ds[2].label, PairLabel::Neutral);
  EXPECT_EQ(ds[1].pair_id, "p1");
  EXPECT_EQ(ds[1].left.text, "left 1");
}

TEST(LoadPairs, DuplicateLabelSetsPositiveClass) {
  const auto ds = parse_pairs(pairs_csv({"Duplicate", "neutral"}));
  EXPECT_EQ(ds.positive_class(), PairLabel::Duplicate);
}

TEST(LoadPairs, ContractErrors) {
  EXPECT_EQ(code_of([] { parse_pairs("pair_id,req1_id,req1_text,req2_id,req2_text\np,a,x,b,y\n"); }),
            ErrorCode::MissingColumn);
  EXPECT_EQ(code_of([] { parse_pairs(pairs_csv({"neutral", "maybe"})); }), ErrorCode::UnknownLabel);
  EXPECT_EQ(code_of([] { parse_pairs(""); }), ErrorCode::EmptyFile);
  EXPECT_EQ(code_of([] { parse_pairs(pairs_csv({})); }), ErrorCode::EmptyFile);
  EXPECT_EQ(code_of([] { parse_pairs(pairs_csv({"conflict", "duplicate"})); }), ErrorCode::MixedPositiveLabels);
  std::string dup = pairs_csv({"neutral"}) + "p0,c,x,d,y,neutral\n";
  EXPECT_EQ(code_of([&] { parse_pairs(dup); }), ErrorCode::DuplicatePairId);
}

TEST(LoadPairs, ErrorNamesTheRow) {
  try {
    parse_pairs(pairs_csv({"neutral", "neutral", "sideways"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadPairs, CanonicalFileRoundTripsByteIdentically) {
  const std::string canonical =
      "pair_id,req1_id,req1_text,req2_id,req2_text,label\n"
      "p1,r1,\"The system shall log, then exit.\",r2,Plain text,conflict\n"
      "p2,r3,\"Quote \"\"here\"\"\",r4,\"two\nlines\",neutral\n"
      "p3,r5,,r6,Ünïcödé text,neutral\n";
  oracle::TempDir dir("pairs");
  const std::string path = dir.str("uav.csv");
  std::ofstream(path, std::ios::binary) << canonical;
  const auto ds = load_pairs(path);
  EXPECT_EQ(ds.name(), "uav");
  EXPECT_EQ(format_pairs(ds), canonical);
}

TEST(StratifiedKfold, NinePairsBalancedPerFold) {
  const auto ds = make_dataset(6, 3);
  const auto plan = stratified_kfold(ds, 3, 11);
  for (int f = 0; f < 3; ++f) {
    std::size_t neutral = 0, conflict = 0;
    for (auto i : plan.test_indices(f)) (ds[i].label == PairLabel::Neutral ? neutral : conflict)++;
    EXPECT_EQ(neutral, 2u);
    EXPECT_EQ(conflict, 1u);
  }
}

TEST(StratifiedKfold, DeterministicPerSeed) {
  const auto ds = make_dataset(50, 17);
  const auto a = stratified_kfold(ds, 3, 5);
  const auto b = stratified_kfold(ds, 3, 5);
  EXPECT_EQ(a.fold_of, b.fold_of);
  const auto c = stratified_kfold(ds, 3, 6);
  EXPECT_NE(a.fold_of, c.fold_of);
}

TEST(StratifiedKfold, UavSizedFoldSizes) {
  // 6670 = 3 * 2223 + 1, so exactly one fold takes the extra pair.
  const auto ds = make_dataset(6670 - 1000, 1000);
  auto sizes = stratified_kfold(ds, 3, 1).fold_sizes();
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{2223, 2223, 2224}));
}

TEST(StratifiedKfold, PartitionAndStratificationProperties) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(5));
    const auto n_pos = static_cast<std::size_t>(k + rng.below(40));
    const auto n_neu = static_cast<std::size_t>(k + rng.below(120));
    const auto ds = make_dataset(n_neu, n_pos, trial % 2 ? PairLabel::Duplicate : PairLabel::Conflict);
    const auto plan = stratified_kfold(ds, k, rng.next());

    std::set<std::size_t> seen;
    for (int f = 0; f < k; ++f) {
      for (auto i : plan.test_indices(f)) EXPECT_TRUE(seen.insert(i).second) << "pair in two folds";
      const auto train = plan.train_indices(f);
      EXPECT_EQ(train.size() + plan.test_indices(f).size(), ds.size());
    }
    EXPECT_EQ(seen.size(), ds.size());

    for (PairLabel label : {ds.positive_class(), PairLabel::Neutral}) {
      std::vector<std::size_t> per_fold(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds[i].label == label) ++per_fold[static_cast<std::size_t>(plan.fold_of[i])];
      const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
      EXPECT_LE(*hi - *lo, 1u);
    }
    const auto sizes = plan.fold_sizes();
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    EXPECT_LE(*hi - *lo, 1u);
  }
}

TEST(StratifiedKfold, ClassTooSmall) {
  const auto ds = make_dataset(10, 2);
  EXPECT_EQ(code_of([&] { stratified_kfold(ds, 3, 1); }), ErrorCode::ClassTooSmall);
}

TEST(CarveValidation, Examples) {
  auto ids = [](std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back("id" + std::to_string(i));
    return v;
  };
  auto [t100, v100] = carve_validation(ids(100), 0.05, 1);
  EXPECT_EQ(t100.size(), 95u);
  EXPECT_EQ(v100.size(), 5u);
  auto [t10, v10] = carve_validation(ids(10), 0.05, 1);
  EXPECT_EQ(t10.size(), 9u);
  EXPECT_EQ(v10.size(), 1u);
  // round(0.05 * 4447) = round(222.35) = 222
  auto [t, v] = carve_validation(ids(4447), 0.05, 1);
  EXPECT_EQ(v.size(), 222u);
  EXPECT_EQ(t.size(), 4447u - 222u);
}

TEST(CarveValidation, DisjointDeterministicOrdered) {
  std::vector<std::string> all;
  for (int i = 0; i < 300; ++i) all.push_back("x" + std::to_string(1000 + i));
  const auto a = carve_validation(all, 0.1, 42);
  const auto b = carve_validation(all, 0.1, 42);
  EXPECT_EQ(a, b);
  std::set<std::string> train(a.first.begin(), a.first.end());
  for (const auto& id : a.second) EXPECT_FALSE(train.count(id));
  EXPECT_TRUE(std::is_sorted(a.first.begin(), a.first.end()));
  EXPECT_TRUE(std::is_sorted(a.second.begin(), a.second.end()));
  EXPECT_EQ(code_of([&] { carve_validation(all, 1.0, 1); }), ErrorCode::InvalidArgument);
}
