#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/fusion.hpp"
#include "reqfuse/llm_store.hpp"
#include "reqfuse/pca.hpp"

using namespace reqfuse;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no reqfuse::Error thrown";
  return ErrorCode::Io;
}

std::string sim_line(const std::string& pair, std::string_view model, double v) {
  std::ostringstream s;
  s.precision(17);
  s << R"({"pair_id":")" << pair << R"(","model":")" << model << R"(","kind":"sim","values":[)" << v << "]}";
  return s.str();
}

std::string three_pair_store(bool shuffled = false) {
  std::vector<std::string> lines;
  for (int p = 0; p < 3; ++p)
    for (std::size_t m = 0; m < kSimModels.size(); ++m)
      lines.push_back(sim_line("p" + std::to_string(p), to_string(kSimModels[m]), 0.1 * static_cast<double>(m + 1)));
  if (shuffled) {
    Rng rng(3);
    rng.shuffle(std::span<std::string>(lines));
  }
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  return text;
}

}  // namespace

TEST(LlmModels, CanonicalOrderAndClsSubset) {
  for (std::size_t i = 1; i < kSimModels.size(); ++i)
    EXPECT_LT(to_string(kSimModels[i - 1]), to_string(kSimModels[i]));
  EXPECT_EQ(kClsModels.size(), 8u);
  for (auto m : kClsModels) EXPECT_TRUE(has_cls(m));
  EXPECT_FALSE(has_cls(LlmModel::BART));
  EXPECT_FALSE(has_cls(LlmModel::XLM));
  EXPECT_EQ(parse_llm_model("roberta"), LlmModel::RoBERTa);
  EXPECT_FALSE(parse_llm_model("T5").has_value());
}

TEST(Store, LookupsAndCanonicalVector) {
  const auto store = parse_store(three_pair_store());
  EXPECT_EQ(store.size(), 30u);
  for (int p = 0; p < 3; ++p) {
    const auto v = llm_sim_vector("p" + std::to_string(p), store);
    for (std::size_t m = 0; m < 10; ++m) EXPECT_DOUBLE_EQ(v[m], 0.1 * static_cast<double>(m + 1));
  }
}

TEST(Store, ShuffledRecordsGiveSameVectorAndBytes) {
  const auto a = parse_store(three_pair_store());
  const auto b = parse_store(three_pair_store(true));
  EXPECT_EQ(llm_sim_vector("p1", a), llm_sim_vector("p1", b));
  EXPECT_EQ(format_store(a), format_store(b));
}

TEST(Store, MissingScore) {
  std::string text;
  for (std::size_t m = 0; m < 9; ++m) text += sim_line("p", to_string(kSimModels[m]), 0.5) + "\n";
  const auto store = parse_store(text);
  EXPECT_EQ(code_of([&] { llm_sim_vector("p", store); }), ErrorCode::MissingScore);
  EXPECT_EQ(code_of([&] { llm_sim_vector("nope", store); }), ErrorCode::MissingScore);
  EXPECT_EQ(code_of([&] { cls_embedding("p", LlmModel::BERT, store); }), ErrorCode::MissingEmbedding);
}

TEST(Store, ContractErrors) {
  const auto line = sim_line("p", "BERT", 0.5);
  EXPECT_EQ(code_of([&] { parse_store(line + "\n" + line + "\n"); }), ErrorCode::DuplicateKey);
  EXPECT_EQ(code_of([] { parse_store("{not json}\n"); }), ErrorCode::MalformedRecord);
  EXPECT_EQ(code_of([] { parse_store(R"({"pair_id":"p","model":"BERT","kind":"sim","values":[0.1,0.2]})"); }),
            ErrorCode::MalformedRecord);
  EXPECT_EQ(code_of([] { parse_store(R"({"pair_id":"p","model":"T5","kind":"sim","values":[0.1]})"); }),
            ErrorCode::MalformedRecord);
  EXPECT_EQ(code_of([] { parse_store(R"({"pair_id":"p","model":"BERT","kind":"vec","values":[0.1]})"); }),
            ErrorCode::MalformedRecord);
  EXPECT_EQ(code_of([] {
              parse_store(R"({"pair_id":"a","model":"BERT","kind":"cls","values":[0.1,0.2]})"
                          "\n"
                          R"({"pair_id":"b","model":"BERT","kind":"cls","values":[0.1]})");
            }),
            ErrorCode::DimInconsistent);
}

TEST(Store, MalformedRecordNamesLine) {
  try {
    parse_store(sim_line("p", "BERT", 0.5) + "\n\n" + "[1,2]\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Store, RoundTripIsBitExact) {
  EmbeddingStore store;
  Rng rng(17);
  for (int p = 0; p < 20; ++p) {
    const auto id = "pair" + std::to_string(p);
    for (auto m : kSimModels) store.add({id, m, RecordKind::Sim, {rng.uniform()}, ""});
    std::vector<double> cls(24);
    for (auto& x : cls) x = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    store.add({id, LlmModel::BERT, RecordKind::Cls, cls, ""});
  }
  const auto text = format_store(store);
  const auto back = parse_store(text);
  ASSERT_EQ(back.size(), store.size());
  for (int p = 0; p < 20; ++p) {
    const auto id = "pair" + std::to_string(p);
    EXPECT_EQ(llm_sim_vector(id, back), llm_sim_vector(id, store));
    EXPECT_EQ(*back.cls(id, LlmModel::BERT), *store.cls(id, LlmModel::BERT));
  }
  EXPECT_EQ(format_store(back), text);
}

TEST(Store, MetaIsPreserved) {
  const auto store =
      parse_store(R"({"pair_id":"p","model":"BERT","kind":"sim","values":[0.25],"meta":{"pooling":"mean"}})");
  const auto text = format_store(store);
  EXPECT_NE(text.find("pooling"), std::string::npos);
  EXPECT_EQ(format_store(parse_store(text)), text);
}

namespace {

std::vector<std::vector<double>> random_samples(std::uint64_t seed, std::size_t n, std::size_t d) {
  Rng rng(seed);
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  // correlated columns so the spectrum is not flat
  for (auto& row : x) {
    const double shared = rng.normal();
    for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal() * (1.0 + 0.1 * static_cast<double>(j)) + shared * static_cast<double>(j % 3);
  }
  return x;
}

}  // namespace

TEST(Pca, ExplainedVarianceMatchesEigenOracle) {
  const auto x = random_samples(1, 50, 20);
  const auto want = oracle::jacobi_eigenvalues(oracle::sample_covariance(x));
  const auto model = fit_pca(x, 16);
  ASSERT_EQ(model.explained_variance().size(), 16);
  for (Eigen::Index i = 0; i < 16; ++i) {
    const auto w = want[static_cast<std::size_t>(i)];
    EXPECT_LE(std::abs(model.explained_variance()(i) - w) / w, 1e-6);
    if (i > 0) EXPECT_LE(model.explained_variance()(i), model.explained_variance()(i - 1));
  }
}

TEST(Pca, ComponentsOrthonormalAndSignPinned) {
  const auto model = fit_pca(random_samples(2, 40, 20), 8);
  const Eigen::MatrixXd gram = model.components() * model.components().transpose();
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-8);
  for (Eigen::Index r = 0; r < 8; ++r) {
    Eigen::Index arg = 0;
    model.components().row(r).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(model.components()(r, arg), 0.0);
  }
}

TEST(Pca, ExactEightDimSubspace) {
  Rng rng(8);
  std::vector<std::vector<double>> basis(8, std::vector<double>(20));
  for (auto& b : basis)
    for (auto& v : b) v = rng.normal();
  std::vector<double> offset(20);
  for (auto& v : offset) v = rng.uniform(-5, 5);
  std::vector<std::vector<double>> x;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> row = offset;
    for (const auto& b : basis) {
      const double c = rng.normal();
      for (std::size_t j = 0; j < 20; ++j) row[j] += c * b[j];
    }
    x.push_back(row);
  }
  const auto model = fit_pca(x, 8);
  for (const auto& row : x) {
    const auto rec = model.reconstruct(model.reduce(row));
    double err = 0.0;
    for (std::size_t j = 0; j < 20; ++j) err += (rec[j] - row[j]) * (rec[j] - row[j]);
    EXPECT_LT(std::sqrt(err), 1e-8);
  }
}

TEST(Pca, ReduceMatchesDenseProjection) {
  const auto x = random_samples(3, 30, 12);
  const auto model = fit_pca(x, 8);
  std::vector<double> mean(12);
  for (Eigen::Index j = 0; j < 12; ++j) mean[static_cast<std::size_t>(j)] = model.mean()(j);
  EXPECT_LT(oracle::dot(model.reduce(mean), model.reduce(mean)), 1e-24);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> e(12);
    for (auto& v : e) v = rng.normal(0, 3);
    const auto got = model.reduce(e);
    double centred_norm2 = 0.0;
    for (std::size_t j = 0; j < 12; ++j) centred_norm2 += (e[j] - mean[j]) * (e[j] - mean[j]);
    for (std::size_t c = 0; c < 8; ++c) {
      double want = 0.0;
      for (std::size_t j = 0; j < 12; ++j)
        want += model.components()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) * (e[j] - mean[j]);
      EXPECT_NEAR(got[c], want, 1e-9);
    }
    EXPECT_LE(std::sqrt(oracle::dot(got, got)), std::sqrt(centred_norm2) + 1e-9);
  }
  EXPECT_EQ(code_of([&] { model.reduce(std::vector<double>(5)); }), ErrorCode::DimMismatch);
}

TEST(Pca, Errors) {
  EXPECT_EQ(code_of([] { fit_pca(random_samples(5, 30, 20), 12); }), ErrorCode::BadTargetDim);
  EXPECT_EQ(code_of([] { fit_pca(random_samples(5, 8, 20), 8); }), ErrorCode::TooFewSamples);
  const std::vector<PairEmbedding> mixed = {{"a", LlmModel::BERT, {1, 2}}, {"b", LlmModel::GPT, {1, 2}}};
  EXPECT_THROW(fit_pca(mixed, 8), Error);
}

TEST(Pca, DeterministicAndProvenanceIsTrainIds) {
  const auto x = random_samples(6, 20, 10);
  std::vector<PairEmbedding> emb;
  for (std::size_t i = 0; i < x.size(); ++i) emb.push_back({"p" + std::to_string(i), LlmModel::BERT, x[i]});
  const auto a = fit_pca(emb, 8);
  const auto b = fit_pca(emb, 8);
  EXPECT_EQ(a.components(), b.components());
  EXPECT_EQ(a.provenance().ids().size(), x.size());
  EXPECT_TRUE(a.provenance().contains("p3"));
}

TEST(Fusion, SimilarityStrategyDims) {
  std::vector<std::size_t> dims;
  for (const auto& s : similarity_strategies()) dims.push_back(s.dim());
  EXPECT_EQ(dims, (std::vector<std::size_t>{10, 10, 10, 20, 20, 20, 30}));
  EXPECT_EQ(FusionStrategy::parse("CLS(8)+TFIDF+BM25+LLM").dim(), 38u);
  EXPECT_EQ(FusionStrategy::parse("TFIDF+BM25").dim(), 20u);
  EXPECT_EQ(FusionStrategy::parse("llm").dim(), 10u);
}

TEST(Fusion, EveryClsCombinationAddsItsDim) {
  for (const auto& s : similarity_strategies()) {
    for (std::size_t d : kPcaTargetDims) {
      auto with = s;
      with.cls_dim = d;
      EXPECT_EQ(with.dim(), s.dim() + d);
      EXPECT_EQ(FusionStrategy::parse(with.name()), with);
      EXPECT_EQ(column_names(with).size(), with.dim());
      std::size_t total = 0;
      for (const auto& span : layout_of(with)) total += span.length;
      EXPECT_EQ(total, with.dim());
    }
  }
}

TEST(Fusion, BlockOrderAndMissingBlock) {
  SimilarityBlock t{}, b{};
  LlmSimVector l{};
  for (std::size_t i = 0; i < 10; ++i) {
    t[i] = 1.0 + static_cast<double>(i);
    b[i] = 100.0 + static_cast<double>(i);
    l[i] = 1000.0 + static_cast<double>(i);
  }
  FeatureInputs in{std::vector<double>{-1, -2, -3, -4, -5, -6, -7, -8}, t, b, l};
  const auto fused = fuse(FusionStrategy::parse("CLS(8)+TFIDF+BM25+LLM"), in);
  ASSERT_EQ(fused.values.size(), 38u);
  EXPECT_EQ(fused.values[0], -1);
  EXPECT_EQ(fused.values[8], 1.0);
  EXPECT_EQ(fused.values[18], 100.0);
  EXPECT_EQ(fused.values[28], 1000.0);
  ASSERT_EQ(fused.layout.size(), 4u);
  EXPECT_EQ(fused.layout[0].block, FeatureBlock::CLS);
  EXPECT_EQ(fused.layout[3].block, FeatureBlock::LLM);

  const auto bl = fuse(FusionStrategy::parse("BM25+LLM"), in);
  EXPECT_EQ(bl.values[0], 100.0);
  EXPECT_EQ(bl.values[10], 1000.0);

  FeatureInputs missing{std::nullopt, t, std::nullopt, l};
  EXPECT_EQ(code_of([&] { fuse(FusionStrategy::parse("TFIDF+BM25"), missing); }), ErrorCode::MissingBlock);
  EXPECT_EQ(code_of([&] { fuse(FusionStrategy::parse("CLS(8)+TFIDF"), missing); }), ErrorCode::MissingBlock);
}

TEST(Fusion, ParseRejectsNonsense) {
  EXPECT_THROW(FusionStrategy::parse("TFIDF+WORD2VEC"), Error);
  EXPECT_THROW(FusionStrategy::parse("CLS(12)+TFIDF"), Error);
  EXPECT_THROW(FusionStrategy::parse(""), Error);
}
