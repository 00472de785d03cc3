#include "reqfuse/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <tuple>

namespace reqfuse {

double ReportRow::metric(Objective m) const noexcept {
  switch (m) {
    case Objective::PositiveF1: return f1;
    case Objective::MacroF1: return macro_f1;
    case Objective::Accuracy: return accuracy;
  }
  return f1;
}

void finalize(ReportTable& table) {
  auto& rows = table.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.dataset, a.family, a.strategy, a.classifier, a.cls_model) <
           std::tie(b.dataset, b.family, b.strategy, b.classifier, b.cls_model);
  });
  for (auto& r : rows) r.best = false;
  for (std::size_t start = 0; start < rows.size();) {
    std::size_t end = start;
    while (end < rows.size() && rows[end].dataset == rows[start].dataset) ++end;
    bool any = false;
    double best = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      if (!rows[i].ok) continue;
      const double v = rows[i].metric(table.metric);
      if (!any || v > best) best = v;
      any = true;
    }
    for (std::size_t i = start; i < end; ++i)
      if (rows[i].ok && rows[i].metric(table.metric) == best) rows[i].best = true;
    start = end;
  }
}

const csv::Row& report_header() {
  static const csv::Row header{"dataset",   "family",          "strategy",     "cls_model", "classifier",
                               "status",    "precision",       "precision_std", "recall",   "recall_std",
                               "f1",        "f1_std",          "macro_precision", "macro_recall", "macro_f1",
                               "macro_f1_std", "accuracy",     "best",         "note"};
  return header;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<csv::Row> report_rows(const ReportTable& table) {
  std::vector<csv::Row> out{report_header()};
  for (const auto& r : table.rows) {
    csv::Row row{r.dataset, r.family, r.strategy, r.cls_model, r.classifier, r.ok ? "ok" : "failed"};
    for (double v : {r.precision, r.precision_std, r.recall, r.recall_std, r.f1, r.f1_std, r.macro_precision,
                     r.macro_recall, r.macro_f1, r.macro_f1_std, r.accuracy})
      row.push_back(r.ok ? fixed(v) : "");
    row.push_back(r.best ? "*" : "");
    row.push_back(r.note);
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_csv(const ReportTable& table) {
  std::string out;
  for (const auto& row : report_rows(table)) out += csv::format_row(row) + "\n";
  return out;
}

namespace {

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out;
}

}  // namespace

std::string format_markdown(const ReportTable& table) {
  std::ostringstream out;
  out << "# " << table.title << "\n\n";
  out << "Best " << to_string(table.metric) << " per dataset is marked with `*`.\n\n";
  const auto rows = report_rows(table);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << '|';
    for (const auto& cell : rows[i]) out << ' ' << md_cell(cell) << " |";
    out << '\n';
    if (i == 0) {
      out << '|';
      for (std::size_t c = 0; c < rows[i].size(); ++c) out << "---|";
      out << '\n';
    }
  }
  return out.str();
}

std::vector<csv::Row> parse_markdown_table(std::string_view text) {
  std::vector<csv::Row> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line.front() != '|') continue;

    csv::Row cells;
    std::string cur;
    bool escape = false;
    for (std::size_t i = 1; i < line.size(); ++i) {
      const char c = line[i];
      if (escape) {
        cur += c;
        escape = false;
      } else if (c == '\\') {
        escape = true;
      } else if (c == '|') {
        // Cells are written as "| value |": strip the single padding spaces.
        std::string cell = cur;
        if (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
        if (!cell.empty() && cell.back() == ' ') cell.pop_back();
        cells.push_back(std::move(cell));
        cur.clear();
      } else {
        cur += c;
      }
    }
    const bool separator = std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
      return !c.empty() && c.find_first_not_of("-:") == std::string::npos;
    });
    if (!cells.empty() && !separator) rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace reqfuse
