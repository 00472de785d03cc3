#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqfuse/report.hpp"
#include "reqfuse/search.hpp"

namespace reqfuse {

struct DatasetRef {
  std::string name;
  std::string pairs;  // pairs CSV
  std::string store;  // store JSONL, may be empty
};

/// Per-fold predictions produced outside the core (fine-tuned models).
struct ImportedRef {
  std::string dataset;
  std::string name;
  std::string predictions;
};

/// A grid of pipelines: datasets x strategies x CLS models (hybrid
/// strategies only) x classifiers, on top of a shared base config.
struct ExperimentPlan {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::string out = "out";
  int workers = 1;
  Objective best_metric = Objective::PositiveF1;
  std::vector<DatasetRef> datasets;
  std::vector<std::string> strategies;
  std::vector<std::string> cls_models;
  std::vector<nlohmann::json> classifiers;  // "MLP" or {"algo": ..., "params": {...}}
  nlohmann::json base = nlohmann::json::object();
  std::vector<ImportedRef> imported;
};

/// Relative paths inside the plan resolve against `base_dir`.
ExperimentPlan parse_plan(const nlohmann::json& doc, const std::string& base_dir = "");
ExperimentPlan load_plan(const std::string& path);

struct Cell {
  std::size_t index = 0;
  std::size_t dataset = 0;  // position in plan.datasets
  nlohmann::json config;    // merged, unresolved
};

/// Grid cells in plan order. Cell i runs with seed derive_seed(plan.seed, i);
/// every cell shares plan.seed for its fold assignment.
std::vector<Cell> expand(const ExperimentPlan& plan);

struct CellResult {
  Cell cell;
  std::string key;  // cache key; empty when the config failed to resolve
  bool from_cache = false;
  ReportRow row;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::size_t computed = 0;
  std::size_t cached = 0;
  ReportTable table;
};

/// Runs (or resumes) every cell, persisting each finished cell under
/// <out>/cells/<key>.json, then writes <out>/manifest.json, report.csv and
/// report.md. Failed cells are reported and retried on the next run.
ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Rebuilds the report table from a finished run directory.
ReportTable load_report(const std::string& out_dir);

}  // namespace reqfuse
