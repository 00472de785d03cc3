#include "reqfuse/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/pca.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {
namespace {

// Seed streams within one fold.
constexpr std::uint64_t kTraditionalStream = 1;
constexpr std::uint64_t kClassifierStream = 2;
constexpr std::uint64_t kSearchStream = 3;

bool needs_store(const FusionStrategy& s) { return s.llm || s.has_cls(); }

}  // namespace

Pipeline Pipeline::assemble(const PipelineConfig& cfg) {
  std::shared_ptr<const EmbeddingStore> store;
  if (needs_store(cfg.fusion)) {
    if (cfg.store.empty() || !std::filesystem::exists(cfg.store))
      throw Error(ErrorCode::MissingStore, "fusion '" + cfg.fusion.name() + "' needs a store; '" + cfg.store +
                                               "' does not exist");
    store = std::make_shared<const EmbeddingStore>(load_store(cfg.store));
  }
  return assemble(cfg, std::move(store));
}

Pipeline Pipeline::assemble(const PipelineConfig& cfg, std::shared_ptr<const EmbeddingStore> store) {
  if (!cfg.fusion.tfidf && !cfg.fusion.bm25 && !cfg.fusion.llm)
    throw Error(ErrorCode::BadConfig, "fusion needs at least one similarity block");
  if (cfg.family == Family::Hybrid) {
    if (!cfg.fusion.has_cls()) throw Error(ErrorCode::BadConfig, "HYBRID pipelines need a CLS(d) fusion prefix");
    if (!cfg.cls_model) throw Error(ErrorCode::BadConfig, "HYBRID pipelines need cls_model");
    if (!has_cls(*cfg.cls_model))
      throw Error(ErrorCode::BadConfig, std::string(to_string(*cfg.cls_model)) + " provides no CLS embeddings");
    if (!is_valid_pca_dim(cfg.fusion.cls_dim))
      throw Error(ErrorCode::BadTargetDim, "CLS dimension must be one of 8, 16, 32, 64, 128");
  } else {
    if (cfg.fusion.has_cls() || cfg.cls_model)
      throw Error(ErrorCode::BadConfig, "SIMILARITY pipelines take no CLS source");
  }
  if (needs_store(cfg.fusion) && !store)
    throw Error(ErrorCode::MissingStore, "fusion '" + cfg.fusion.name() + "' needs an embedding store");
  if (cfg.classifier.algo != Algorithm::Plugin || has_plugin(cfg.classifier.plugin)) validate(cfg.classifier);
  else throw Error(ErrorCode::UnknownAlgorithm, "no classifier named '" + cfg.classifier.plugin + "'");
  return Pipeline(cfg, std::move(store));
}

FoldFeatures Pipeline::build_features(const PairDataset& ds, const std::vector<std::size_t>& train,
                                      const std::vector<std::size_t>& test, std::uint64_t seed) const {
  FoldFeatures out;
  for (auto i : train) {
    out.train_ids.push_back(ds[i].pair_id);
    out.y_train.push_back(static_cast<int>(ds[i].label));
  }
  for (auto i : test) {
    out.test_ids.push_back(ds[i].pair_id);
    out.y_test.push_back(static_cast<int>(ds[i].label));
  }
  const Provenance train_prov(out.train_ids);

  // Traditional scorer over the distinct training requirement texts.
  std::optional<TraditionalScorer> scorer;
  if (cfg_.fusion.tfidf || cfg_.fusion.bm25) {
    std::vector<std::string> texts;
    std::unordered_set<std::string> seen;
    for (auto i : train) {
      for (const auto* t : {&ds[i].left.text, &ds[i].right.text})
        if (seen.insert(*t).second) texts.push_back(*t);
    }
    TraditionalConfig tc = cfg_.traditional;
    tc.seed = cfg_.sim_seed ? *cfg_.sim_seed : derive_seed(seed, kTraditionalStream);
    scorer = TraditionalScorer::fit(texts, tc, train_prov, cfg_.fusion.tfidf, cfg_.fusion.bm25);
    for (const auto* p : scorer->provenances()) out.fitted.push_back(*p);
  }

  std::optional<PcaModel> pca;
  if (cfg_.fusion.has_cls()) {
    std::vector<PairEmbedding> embeddings;
    for (auto i : train)
      embeddings.push_back({ds[i].pair_id, *cfg_.cls_model, cls_embedding(ds[i].pair_id, *cfg_.cls_model, *store_)});
    pca = fit_pca(embeddings, cfg_.fusion.cls_dim);
    out.fitted.push_back(pca->provenance());
  }

  std::unordered_map<std::string, DocumentProfile> profiles;
  auto profile = [&](const std::string& text) -> const DocumentProfile& {
    auto it = profiles.find(text);
    if (it == profiles.end()) it = profiles.emplace(text, scorer->profile(text)).first;
    return it->second;
  };

  const std::size_t dim = feature_dim();
  auto fill = [&](const std::vector<std::size_t>& rows) {
    FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& pair = ds[rows[r]];
      FeatureInputs in;
      if (scorer) {
        const auto& a = profile(pair.left.text);
        const auto& b = profile(pair.right.text);
        if (cfg_.fusion.tfidf) in.tfidf = scorer->block(a, b, Representation::TFIDF);
        if (cfg_.fusion.bm25) in.bm25 = scorer->block(a, b, Representation::BM25);
      }
      if (cfg_.fusion.llm) in.llm = llm_sim_vector(pair.pair_id, *store_);
      if (pca) in.cls = pca->reduce(cls_embedding(pair.pair_id, *cfg_.cls_model, *store_));
      const FusedFeatureVector v = fuse(cfg_.fusion, in);
      for (std::size_t c = 0; c < dim; ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v.values[c];
    }
    return x;
  };
  out.x_train = fill(train);
  out.x_test = fill(test);
  return out;
}

FoldOutcome Pipeline::run_fold(const PairDataset& ds, const std::vector<std::size_t>& train,
                               const std::vector<std::size_t>& test, int /*fold*/, std::uint64_t seed) {
  FoldFeatures f = build_features(ds, train, test, seed);
  FoldOutcome out;
  out.fitted = std::move(f.fitted);
  out.test_ids = f.test_ids;
  out.y_true = f.y_test;

  ClassifierSpec spec = cfg_.classifier;
  spec.seed = derive_seed(seed, kClassifierStream);
  if (cfg_.search.enabled) {
    SearchRequest req;
    req.base = spec;
    req.space = cfg_.search.space.empty() ? default_space(spec.algo) : cfg_.search.space;
    req.budget = cfg_.search.budget;
    req.objective = cfg_.search.objective;
    req.inner_folds = cfg_.search.folds;
    req.positive_label = static_cast<int>(ds.positive_class());
    req.seed = derive_seed(seed, kSearchStream);
    SearchResult result = search_hyperparams(req, f.x_train, f.y_train, f.train_ids);
    spec = result.best;
    out.chosen = spec.params;
    out.fitted.push_back(std::move(result.touched));
  }
  const TrainedClassifier model = fit(spec, f.x_train, f.y_train);
  out.fitted.emplace_back(f.train_ids);
  out.y_pred = model.predict(f.x_test);
  return out;
}

CvResult evaluate(Pipeline& pipeline, const PairDataset& ds) {
  const auto& cfg = pipeline.config();
  const FoldPlan plan = stratified_kfold(ds, cfg.cv_k, cfg.fold_seed());
  return cross_validate(pipeline, ds, plan, cfg.seed, cfg.macro_f1);
}

std::vector<std::string> export_features(const Pipeline& pipeline, const PairDataset& ds, const FoldPlan& plan,
                                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto columns = pipeline.columns();
  csv::Row header{"pair_id"};
  header.insert(header.end(), columns.begin(), columns.end());
  header.push_back("label");

  std::vector<std::string> written;
  auto write = [&](const std::string& path, const std::vector<std::string>& ids, const FeatureMatrix& x,
                   const std::vector<int>& y) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    csv::write_row(out, header);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      csv::Row row{ids[r]};
      for (Eigen::Index c = 0; c < x.cols(); ++c) row.push_back(csv::format_double(x(static_cast<Eigen::Index>(r), c)));
      row.emplace_back(to_string(static_cast<PairLabel>(y[r])));
      csv::write_row(out, row);
    }
    written.push_back(path);
  };
  for (int f = 0; f < plan.k; ++f) {
    const FoldFeatures ff = pipeline.build_features(ds, plan.train_indices(f), plan.test_indices(f),
                                                    derive_seed(pipeline.config().seed, static_cast<std::uint64_t>(f)));
    const std::string stem = out_dir + "/fold" + std::to_string(f);
    write(stem + "_train.csv", ff.train_ids, ff.x_train, ff.y_train);
    write(stem + "_test.csv", ff.test_ids, ff.x_test, ff.y_test);
  }
  return written;
}

FeatureTable read_feature_csv(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, path + " is empty");
  const auto& header = rows[0];
  if (header.size() < 3 || header.front() != "pair_id" || header.back() != "label")
    throw Error(ErrorCode::MissingColumn, path + ": header must start with pair_id and end with label");
  FeatureTable t;
  t.columns.assign(header.begin() + 1, header.end() - 1);
  const auto d = static_cast<Eigen::Index>(t.columns.size());
  t.x.resize(static_cast<Eigen::Index>(rows.size() - 1), d);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw Error(ErrorCode::MalformedRecord, path + " row " + std::to_string(r + 1) + ": wrong field count");
    t.pair_ids.push_back(row.front());
    for (Eigen::Index c = 0; c < d; ++c)
      t.x(static_cast<Eigen::Index>(r - 1), c) = csv::parse_double(row[static_cast<std::size_t>(c) + 1]);
    auto label = parse_label(row.back());
    if (!label) throw Error(ErrorCode::UnknownLabel, path + " row " + std::to_string(r + 1) + ": bad label");
    t.labels.push_back(static_cast<int>(*label));
  }
  return t;
}

}  // namespace reqfuse
