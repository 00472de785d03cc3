#include "reqfuse/experiment.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "reqfuse/config.hpp"
#include "reqfuse/corpus.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/hash.hpp"
#include "reqfuse/pipeline.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    out << text;
  }
  fs::rename(tmp, path);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string str(const json& doc, const char* key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_string()) throw Error(ErrorCode::BadConfig, std::string("plan key '") + key + "' must be a string");
  return doc[key].get<std::string>();
}

std::vector<std::string> strings(const json& doc, const char* key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  if (!doc[key].is_array()) throw Error(ErrorCode::BadConfig, std::string("plan key '") + key + "' must be a list");
  for (const auto& v : doc[key]) {
    if (!v.is_string()) throw Error(ErrorCode::BadConfig, std::string("plan key '") + key + "' holds a non-string");
    out.push_back(v.get<std::string>());
  }
  return out;
}

json summary_json(const CvResult& cv) {
  auto agg = [](const Aggregate& a) { return json{{"mean", a.mean}, {"std", a.std}}; };
  auto sum = [&](const CvSummary& s) {
    return json{{"precision", agg(s.precision)}, {"recall", agg(s.recall)}, {"f1", agg(s.f1)}};
  };
  json folds = json::array();
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const auto& r = cv.folds[f];
    json fold = {{"fold", f},
                 {"test_size", cv.outcomes[f].test_ids.size()},
                 {"positive", {{"precision", r.positive().precision}, {"recall", r.positive().recall},
                               {"f1", r.positive().f1}}},
                 {"macro", {{"precision", r.macro.precision}, {"recall", r.macro.recall}, {"f1", r.macro.f1}}},
                 {"accuracy", r.accuracy}};
    if (cv.outcomes[f].chosen) fold["chosen"] = *cv.outcomes[f].chosen;
    folds.push_back(std::move(fold));
  }
  return {{"folds", folds}, {"positive", sum(cv.positive)}, {"macro", sum(cv.macro)}, {"accuracy", agg(cv.accuracy)}};
}

void fill_metrics(ReportRow& row, const json& summary) {
  const auto& p = summary["positive"];
  const auto& m = summary["macro"];
  row.precision = p["precision"]["mean"].get<double>();
  row.precision_std = p["precision"]["std"].get<double>();
  row.recall = p["recall"]["mean"].get<double>();
  row.recall_std = p["recall"]["std"].get<double>();
  row.f1 = p["f1"]["mean"].get<double>();
  row.f1_std = p["f1"]["std"].get<double>();
  row.macro_precision = m["precision"]["mean"].get<double>();
  row.macro_recall = m["recall"]["mean"].get<double>();
  row.macro_f1 = m["f1"]["mean"].get<double>();
  row.macro_f1_std = m["f1"]["std"].get<double>();
  row.accuracy = summary["accuracy"]["mean"].get<double>();
}

json row_json(const ReportRow& r) {
  return {{"dataset", r.dataset},     {"family", r.family}, {"strategy", r.strategy},
          {"cls_model", r.cls_model}, {"classifier", r.classifier}};
}

ReportRow row_from_json(const json& j) {
  ReportRow r;
  r.dataset = j.at("dataset").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.cls_model = j.at("cls_model").get<std::string>();
  r.classifier = j.at("classifier").get<std::string>();
  return r;
}

struct LoadedDataset {
  std::shared_ptr<const PairDataset> pairs;
  std::shared_ptr<const EmbeddingStore> store;
  std::string pairs_hash;
  std::string store_hash;
  std::string error;
};

}  // namespace

ExperimentPlan parse_plan(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::BadConfig, "plan must be a JSON object");
  static const std::vector<std::string> known{"name",        "seed",       "out",         "workers",
                                              "best_metric", "datasets",   "strategies",  "cls_models",
                                              "classifiers", "base",       "imported"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw Error(ErrorCode::BadConfig, "unknown plan key '" + it.key() + "'");
  }
  ExperimentPlan plan;
  plan.name = str(doc, "name", plan.name);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      throw Error(ErrorCode::BadConfig, "plan seed must be a non-negative integer");
    plan.seed = doc["seed"].get<std::uint64_t>();
  }
  plan.out = resolve(base_dir, str(doc, "out", plan.out));
  if (doc.contains("workers")) {
    if (!doc["workers"].is_number_integer() || doc["workers"].get<int>() < 1)
      throw Error(ErrorCode::BadConfig, "plan workers must be a positive integer");
    plan.workers = doc["workers"].get<int>();
  }
  if (doc.contains("best_metric")) plan.best_metric = parse_objective(str(doc, "best_metric", ""));
  if (!doc.contains("datasets") || !doc["datasets"].is_array() || doc["datasets"].empty())
    throw Error(ErrorCode::BadConfig, "plan needs a non-empty datasets list");
  for (const auto& d : doc["datasets"]) {
    DatasetRef ref;
    ref.pairs = resolve(base_dir, str(d, "pairs", ""));
    if (ref.pairs.empty()) throw Error(ErrorCode::BadConfig, "every dataset needs a pairs path");
    ref.name = str(d, "name", fs::path(ref.pairs).stem().string());
    ref.store = resolve(base_dir, str(d, "store", ""));
    plan.datasets.push_back(std::move(ref));
  }
  plan.strategies = strings(doc, "strategies");
  if (plan.strategies.empty()) plan.strategies = {"TFIDF+BM25+LLM"};
  for (const auto& s : plan.strategies) FusionStrategy::parse(s);
  plan.cls_models = strings(doc, "cls_models");
  for (const auto& m : plan.cls_models)
    if (!parse_llm_model(m)) throw Error(ErrorCode::BadConfig, "unknown CLS model '" + m + "'");
  if (doc.contains("classifiers")) {
    if (!doc["classifiers"].is_array()) throw Error(ErrorCode::BadConfig, "plan classifiers must be a list");
    for (const auto& c : doc["classifiers"]) {
      if (c.is_string()) plan.classifiers.push_back({{"algo", c}});
      else if (c.is_object()) plan.classifiers.push_back(c);
      else throw Error(ErrorCode::BadConfig, "classifier entries are names or objects");
    }
  }
  if (plan.classifiers.empty()) plan.classifiers.push_back({{"algo", "MLP"}});
  if (doc.contains("base")) {
    if (!doc["base"].is_object()) throw Error(ErrorCode::BadConfig, "plan base must be an object");
    plan.base = doc["base"];
  }
  if (doc.contains("imported")) {
    for (const auto& i : doc["imported"]) {
      ImportedRef ref{str(i, "dataset", ""), str(i, "name", ""), resolve(base_dir, str(i, "predictions", ""))};
      if (ref.dataset.empty() || ref.name.empty() || ref.predictions.empty())
        throw Error(ErrorCode::BadConfig, "imported entries need dataset, name and predictions");
      plan.imported.push_back(std::move(ref));
    }
  }
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadConfig, std::string("plan is not valid JSON: ") + e.what());
  }
  return parse_plan(doc, fs::path(path).parent_path().string());
}

std::vector<Cell> expand(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    for (const auto& s : plan.strategies) {
      const FusionStrategy strategy = FusionStrategy::parse(s);
      std::vector<json> cls_choices{json(nullptr)};
      if (strategy.has_cls()) {
        cls_choices.clear();
        for (const auto& m : plan.cls_models) cls_choices.emplace_back(m);
        if (cls_choices.empty()) cls_choices.emplace_back(nullptr);  // fails at assembly with BadConfig
      }
      for (const auto& cls : cls_choices) {
        for (const auto& clf : plan.classifiers) {
          Cell cell;
          cell.index = cells.size();
          cell.dataset = d;
          json overlay = {{"family", strategy.has_cls() ? "HYBRID" : "SIMILARITY"},
                          {"fusion", strategy.name()},
                          {"cls_model", cls},
                          {"classifier", clf},
                          {"seed", derive_seed(plan.seed, cell.index)},
                          {"cv", {{"seed", plan.seed}}},
                          {"dataset", plan.datasets[d].pairs},
                          {"store", plan.datasets[d].store}};
          cell.config = merge_config(plan.base, overlay);
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  const fs::path out_dir(plan.out);
  fs::create_directories(out_dir / "cells");

  std::vector<LoadedDataset> loaded(plan.datasets.size());
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    const auto& ref = plan.datasets[d];
    auto& ld = loaded[d];
    try {
      ld.pairs_hash = sha256_file(ref.pairs);
      ld.pairs = std::make_shared<const PairDataset>(load_pairs(ref.pairs));
      if (!ref.store.empty() && fs::exists(ref.store)) {
        ld.store_hash = sha256_file(ref.store);
        ld.store = std::make_shared<const EmbeddingStore>(load_store(ref.store));
      }
    } catch (const std::exception& e) {
      ld.error = e.what();
    }
  }

  const std::vector<Cell> cells = expand(plan);
  ExperimentResult result;
  result.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> computed{0};
  std::atomic<std::size_t> cached{0};

  auto run_cell = [&](const Cell& cell) {
    CellResult cr;
    cr.cell = cell;
    const auto& ref = plan.datasets[cell.dataset];
    const auto& ld = loaded[cell.dataset];
    ReportRow& row = cr.row;
    row.dataset = ref.name;
    try {
      const PipelineConfig cfg = parse_config(cell.config);
      row.family = std::string(to_string(cfg.family));
      row.strategy = cfg.fusion.name();
      row.cls_model = cfg.cls_model ? std::string(to_string(*cfg.cls_model)) : "";
      row.classifier = cfg.classifier.name();
      if (!ld.error.empty()) throw Error(ErrorCode::Io, ld.error);

      const json resolved = to_json(cfg);
      cr.key = sha256_hex(resolved.dump() + "\n" + ld.pairs_hash + "\n" + ld.store_hash);
      const fs::path artifact = out_dir / "cells" / (cr.key + ".json");
      if (fs::exists(artifact)) {
        try {
          const json cachedj = json::parse(read_text(artifact.string()));
          if (cachedj.at("key") == cr.key) {
            fill_metrics(row, cachedj.at("summary"));
            cr.from_cache = true;
            ++cached;
            return cr;
          }
        } catch (const std::exception&) {
          // Unreadable artifacts are recomputed.
        }
      }

      Pipeline pipeline = Pipeline::assemble(cfg, ld.store);
      const CvResult cv = evaluate(pipeline, *ld.pairs);
      const json summary = summary_json(cv);
      fill_metrics(row, summary);
      json art = {{"key", cr.key},
                  {"cell", cell.index},
                  {"config", resolved},
                  {"dataset", ref.name},
                  {"dataset_sha256", ld.pairs_hash},
                  {"store_sha256", ld.store_hash},
                  {"row", row_json(row)},
                  {"summary", summary}};
      write_text(artifact.string(), art.dump(2) + "\n");
      ++computed;
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
      ++computed;
    }
    return cr;
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) result.cells[i] = run_cell(cells[i]);
  };
  const int n_workers = std::max(1, std::min<int>(plan.workers, static_cast<int>(cells.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  result.computed = computed;
  result.cached = cached;

  ReportTable table;
  table.title = plan.name;
  table.metric = plan.best_metric;
  json manifest_rows = json::array();
  for (const auto& cr : result.cells) {
    table.rows.push_back(cr.row);
    json entry = row_json(cr.row);
    entry["key"] = cr.key;
    entry["ok"] = cr.row.ok;
    entry["note"] = cr.row.note;
    manifest_rows.push_back(std::move(entry));
  }

  for (const auto& imp : plan.imported) {
    ReportRow row;
    row.dataset = imp.dataset;
    row.family = "FINETUNED";
    row.strategy = imp.name;
    row.classifier = "-";
    try {
      auto it = std::find_if(plan.datasets.begin(), plan.datasets.end(),
                             [&](const DatasetRef& d) { return d.name == imp.dataset; });
      if (it == plan.datasets.end()) throw Error(ErrorCode::BadConfig, "unknown dataset '" + imp.dataset + "'");
      const auto& ld = loaded[static_cast<std::size_t>(it - plan.datasets.begin())];
      if (!ld.error.empty()) throw Error(ErrorCode::Io, ld.error);
      const PipelineConfig base = parse_config(merge_config(plan.base, json::object()));
      fill_metrics(row, summary_json(evaluate_predictions(*ld.pairs, imp.predictions, base.macro_f1)));
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
    table.rows.push_back(row);
    json entry = row_json(row);
    entry["key"] = "";
    entry["ok"] = row.ok;
    entry["note"] = row.note;
    entry["summary_inline"] = row.ok ? json{{"precision", row.precision}, {"precision_std", row.precision_std},
                                            {"recall", row.recall},       {"recall_std", row.recall_std},
                                            {"f1", row.f1},               {"f1_std", row.f1_std},
                                            {"macro_precision", row.macro_precision},
                                            {"macro_recall", row.macro_recall},
                                            {"macro_f1", row.macro_f1},   {"macro_f1_std", row.macro_f1_std},
                                            {"accuracy", row.accuracy}}
                                     : json(nullptr);
    manifest_rows.push_back(std::move(entry));
  }
  finalize(table);
  result.table = table;

  const json manifest = {{"name", plan.name}, {"best_metric", to_string(plan.best_metric)}, {"rows", manifest_rows}};
  write_text((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
  write_text((out_dir / "report.csv").string(), format_csv(table));
  write_text((out_dir / "report.md").string(), format_markdown(table));
  return result;
}

ReportTable load_report(const std::string& out_dir) {
  const fs::path dir(out_dir);
  json manifest;
  try {
    manifest = json::parse(read_text((dir / "manifest.json").string()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("manifest.json: ") + e.what());
  }
  ReportTable table;
  table.title = manifest.at("name").get<std::string>();
  table.metric = parse_objective(manifest.at("best_metric").get<std::string>());
  for (const auto& entry : manifest.at("rows")) {
    ReportRow row = row_from_json(entry);
    row.ok = entry.at("ok").get<bool>();
    row.note = entry.at("note").get<std::string>();
    if (row.ok) {
      if (entry.contains("summary_inline")) {
        const auto& s = entry["summary_inline"];
        row.precision = s.at("precision").get<double>();
        row.precision_std = s.at("precision_std").get<double>();
        row.recall = s.at("recall").get<double>();
        row.recall_std = s.at("recall_std").get<double>();
        row.f1 = s.at("f1").get<double>();
        row.f1_std = s.at("f1_std").get<double>();
        row.macro_precision = s.at("macro_precision").get<double>();
        row.macro_recall = s.at("macro_recall").get<double>();
        row.macro_f1 = s.at("macro_f1").get<double>();
        row.macro_f1_std = s.at("macro_f1_std").get<double>();
        row.accuracy = s.at("accuracy").get<double>();
      } else {
        const std::string key = entry.at("key").get<std::string>();
        const json art = json::parse(read_text((dir / "cells" / (key + ".json")).string()));
        fill_metrics(row, art.at("summary"));
      }
    }
    table.rows.push_back(std::move(row));
  }
  finalize(table);
  return table;
}

}  // namespace reqfuse
