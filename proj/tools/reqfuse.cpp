#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "reqfuse/config.hpp"
#include "reqfuse/corpus.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/experiment.hpp"
#include "reqfuse/llm_store.hpp"
#include "reqfuse/pipeline.hpp"
#include "reqfuse/report.hpp"
#include "reqfuse/synthetic.hpp"

namespace fs = std::filesystem;
using namespace reqfuse;

namespace {

void write_file(const std::string& path, const std::string& text) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
}

PipelineConfig pipeline_config(const std::string& config_path, const std::string& dataset, const std::string& store,
                               std::optional<std::uint64_t> seed) {
  PipelineConfig cfg = load_config(config_path);
  const auto dir = fs::path(config_path).parent_path();
  auto rel = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (dir / p).lexically_normal().string();
  };
  rel(cfg.dataset);
  rel(cfg.store);
  if (!dataset.empty()) cfg.dataset = dataset;
  if (!store.empty()) cfg.store = store;
  if (seed) cfg.seed = *seed;
  if (cfg.dataset.empty()) throw Error(ErrorCode::BadConfig, "no dataset given (--dataset or config 'dataset')");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Duplicate and conflict detection pipelines for requirement pairs"};
  app.require_subcommand(1);

  std::string config_path, dataset, store, out, from, format = "md";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::size_t pairs = 400;

  auto* fit_report = app.add_subcommand("fit-report", "Run an experiment plan and write its report");
  fit_report->add_option("--config", config_path, "Experiment plan (JSON)")->required()->check(CLI::ExistingFile);
  fit_report->add_option("--seed", seed, "Override the master seed");
  fit_report->add_option("--workers", workers, "Parallel cells")->check(CLI::PositiveNumber);
  fit_report->add_option("--out", out, "Output directory");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Cross-validate one pipeline config");
  evaluate_cmd->add_option("--config", config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--dataset", dataset, "Pairs CSV");
  evaluate_cmd->add_option("--store", store, "Store JSONL");
  evaluate_cmd->add_option("--seed", seed, "Override the config seed");
  evaluate_cmd->add_option("--out", out, "Write metrics.csv here instead of stdout");

  auto* export_cmd = app.add_subcommand("export-features", "Write per-fold feature matrices as CSV");
  export_cmd->add_option("--config", config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--dataset", dataset, "Pairs CSV");
  export_cmd->add_option("--store", store, "Store JSONL");
  export_cmd->add_option("--seed", seed, "Override the config seed");
  export_cmd->add_option("--out", out, "Output directory")->required();

  auto* report_cmd = app.add_subcommand("report", "Render the report of a finished run");
  report_cmd->add_option("--from", from, "Run directory")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_option("--format", format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  report_cmd->add_option("--out", out, "Output file instead of stdout");

  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic benchmark pairs and store");
  synth_cmd->add_option("--out", out, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Generator seed (default 7)");
  synth_cmd->add_option("--pairs", pairs, "Number of pairs")->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check-store", "Validate a store file and print record counts");
  check_cmd->add_option("--store", store, "Store JSONL")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_report->parsed()) {
      ExperimentPlan plan = load_plan(config_path);
      if (seed) plan.seed = *seed;
      if (workers) plan.workers = *workers;
      if (!out.empty()) plan.out = out;
      const ExperimentResult result = run_experiment(plan);
      std::size_t failed = 0;
      for (const auto& row : result.table.rows) failed += row.ok ? 0 : 1;
      std::cout << "cells " << result.cells.size() << ", computed " << result.computed << ", cached " << result.cached
                << ", failed " << failed << "\nreport: " << (fs::path(plan.out) / "report.md").string() << "\n";
      for (const auto& row : result.table.rows)
        if (!row.ok) std::cerr << "failed: " << row.dataset << " " << row.strategy << " " << row.classifier << ": "
                               << row.note << "\n";
      return 0;
    }
    if (evaluate_cmd->parsed()) {
      const PipelineConfig cfg = pipeline_config(config_path, dataset, store, seed);
      const PairDataset ds = load_pairs(cfg.dataset);
      Pipeline pipeline = Pipeline::assemble(cfg);
      const CvResult cv = evaluate(pipeline, ds);
      std::ostringstream buf;
      write_metric_csv(cv.folds, buf);
      if (out.empty()) {
        std::cout << buf.str();
      } else {
        write_file((fs::path(out) / "metrics.csv").string(), buf.str());
      }
      std::cerr << to_string(ds.positive_class()) << " f1 " << cv.positive.f1.mean << " +- " << cv.positive.f1.std
                << ", macro f1 " << cv.macro.f1.mean << " +- " << cv.macro.f1.std << "\n";
      return 0;
    }
    if (export_cmd->parsed()) {
      const PipelineConfig cfg = pipeline_config(config_path, dataset, store, seed);
      const PairDataset ds = load_pairs(cfg.dataset);
      const Pipeline pipeline = Pipeline::assemble(cfg);
      const FoldPlan plan = stratified_kfold(ds, cfg.cv_k, cfg.fold_seed());
      for (const auto& path : export_features(pipeline, ds, plan, out)) std::cout << path << "\n";
      return 0;
    }
    if (report_cmd->parsed()) {
      const ReportTable table = load_report(from);
      const std::string text = format == "csv" ? format_csv(table) : format_markdown(table);
      if (out.empty()) std::cout << text;
      else write_file(out, text);
      return 0;
    }
    if (synth_cmd->parsed()) {
      SyntheticOptions options;
      options.pairs = pairs;
      if (seed) options.seed = *seed;
      const SyntheticCorpus corpus = make_synthetic(options);
      fs::create_directories(out);
      write_file((fs::path(out) / "synthetic.csv").string(), format_pairs(corpus.dataset));
      write_file((fs::path(out) / "synthetic_store.jsonl").string(), format_store(corpus.store));
      std::cout << corpus.dataset.size() << " pairs, " << corpus.store.size() << " store records\n";
      return 0;
    }
    if (check_cmd->parsed()) {
      const EmbeddingStore s = load_store(store);
      std::size_t sims = 0, cls = 0;
      for (const auto* r : s.records()) (r->kind == RecordKind::Sim ? sims : cls)++;
      std::cout << "ok: " << s.size() << " records (" << sims << " sim, " << cls << " cls)\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
