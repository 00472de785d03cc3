#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "reqfuse/csv.hpp"
#include "reqfuse/search.hpp"

namespace reqfuse {

struct ReportRow {
  std::string dataset;
  std::string family;
  std::string strategy;
  std::string cls_model;
  std::string classifier;
  bool ok = true;
  std::string note;  // failure message for failed cells
  double precision = 0.0;
  double precision_std = 0.0;
  double recall = 0.0;
  double recall_std = 0.0;
  double f1 = 0.0;
  double f1_std = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double macro_f1_std = 0.0;
  double accuracy = 0.0;
  bool best = false;

  double metric(Objective m) const noexcept;
};

struct ReportTable {
  std::string title = "report";
  Objective metric = Objective::PositiveF1;
  std::vector<ReportRow> rows;
};

/// Sorts rows by (dataset, family, strategy, classifier, cls_model) and flags,
/// per dataset, every successful row that attains the best metric value.
void finalize(ReportTable& table);

const csv::Row& report_header();
std::vector<csv::Row> report_rows(const ReportTable& table);
std::string format_csv(const ReportTable& table);
std::string format_markdown(const ReportTable& table);

/// Cells of every table row in a markdown document (header included,
/// separator rows skipped). Escaped pipes are restored.
std::vector<csv::Row> parse_markdown_table(std::string_view text);

}  // namespace reqfuse
