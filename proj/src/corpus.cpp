#include "reqfuse/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {

std::string_view to_string(PairLabel label) noexcept {
  switch (label) {
    case PairLabel::Conflict: return "conflict";
    case PairLabel::Duplicate: return "duplicate";
    case PairLabel::Neutral: return "neutral";
  }
  return "neutral";
}

std::optional<PairLabel> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "conflict") return PairLabel::Conflict;
  if (lower == "duplicate") return PairLabel::Duplicate;
  if (lower == "neutral") return PairLabel::Neutral;
  return std::nullopt;
}

PairDataset::PairDataset(std::string name, std::vector<RequirementPair> pairs, PairLabel fallback_positive)
    : name_(std::move(name)), pairs_(std::move(pairs)), positive_(fallback_positive) {
  if (pairs_.empty()) throw Error(ErrorCode::EmptyFile, "dataset '" + name_ + "' has no pairs");
  if (positive_ == PairLabel::Neutral) {
    throw Error(ErrorCode::InvalidArgument, "positive class cannot be neutral");
  }
  std::optional<PairLabel> seen;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    if (!index_.emplace(p.pair_id, i).second) {
      throw Error(ErrorCode::DuplicatePairId, "pair id '" + p.pair_id + "' at row " + std::to_string(i + 1));
    }
    if (p.label == PairLabel::Neutral) continue;
    if (seen && *seen != p.label) {
      throw Error(ErrorCode::MixedPositiveLabels,
                  "row " + std::to_string(i + 1) + " mixes conflict and duplicate labels");
    }
    seen = p.label;
  }
  if (seen) positive_ = *seen;
}

std::optional<std::size_t> PairDataset::index_of(std::string_view pair_id) const {
  auto it = index_.find(std::string(pair_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PairDataset::count(PairLabel label) const {
  return static_cast<std::size_t>(
      std::count_if(pairs_.begin(), pairs_.end(), [&](const auto& p) { return p.label == label; }));
}

PairDataset parse_pairs(std::string_view text, std::string name) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no header in '" + name + "'");

  const auto& header = rows.front();
  std::array<std::size_t, 6> column{};
  for (std::size_t c = 0; c < column.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), kPairsHeader[c]);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, std::string("column '") + kPairsHeader[c] + "'");
    column[c] = static_cast<std::size_t>(it - header.begin());
  }
  if (rows.size() == 1) throw Error(ErrorCode::EmptyFile, "'" + name + "' has a header but no rows");

  std::vector<RequirementPair> pairs;
  pairs.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::MalformedRecord, "row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                                  " fields, expected " + std::to_string(header.size()));
    }
    auto label = parse_label(row[column[5]]);
    if (!label) throw Error(ErrorCode::UnknownLabel, "'" + row[column[5]] + "' at row " + std::to_string(r));
    pairs.push_back({row[column[0]], {row[column[1]], row[column[2]]}, {row[column[3]], row[column[4]]}, *label});
  }
  return PairDataset(std::move(name), std::move(pairs));
}

PairDataset load_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto stem = path.substr(path.find_last_of('/') + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
  return parse_pairs(buffer.str(), stem);
}

void write_pairs(const PairDataset& ds, std::ostream& out) {
  csv::write_row(out, csv::Row(std::begin(kPairsHeader), std::end(kPairsHeader)));
  for (const auto& p : ds.pairs()) {
    csv::write_row(out, {p.pair_id, p.left.id, p.left.text, p.right.id, p.right.text, std::string(to_string(p.label))});
  }
}

std::string format_pairs(const PairDataset& ds) {
  std::ostringstream out;
  write_pairs(ds, out);
  return out.str();
}

int FoldPlan::fold(std::string_view pair_id) const {
  auto it = std::find(pair_ids.begin(), pair_ids.end(), pair_id);
  if (it == pair_ids.end()) throw Error(ErrorCode::InvalidArgument, "pair id not in fold plan");
  return fold_of[static_cast<std::size_t>(it - pair_ids.begin())];
}

std::vector<std::size_t> FoldPlan::test_indices(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2, got " + std::to_string(k));
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  for (const auto& [label, members] : by_label) {
    if (members.size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::ClassTooSmall, "label " + std::to_string(label) + " has " +
                                                std::to_string(members.size()) + " members, k = " + std::to_string(k));
    }
  }
  std::vector<int> fold_of(labels.size(), -1);
  std::size_t cursor = 0;
  for (auto& [label, members] : by_label) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span(members));
    for (std::size_t idx : members) {
      fold_of[idx] = static_cast<int>(cursor % static_cast<std::size_t>(k));
      ++cursor;
    }
  }
  return fold_of;
}

FoldPlan stratified_kfold(const PairDataset& ds, int k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(ds.size());
  for (const auto& p : ds.pairs()) labels.push_back(static_cast<int>(p.label));
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  try {
    plan.fold_of = stratified_fold_assignment(labels, k, seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ClassTooSmall) throw;
    for (int l = 0; l < kLabelCount; ++l) {
      const auto n = ds.count(static_cast<PairLabel>(l));
      if (n > 0 && n < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::ClassTooSmall, std::string(to_string(static_cast<PairLabel>(l))) + " has " +
                                                  std::to_string(n) + " pairs, k = " + std::to_string(k));
      }
    }
    throw;
  }
  plan.pair_ids.reserve(ds.size());
  for (const auto& p : ds.pairs()) plan.pair_ids.push_back(p.pair_id);
  return plan;
}

std::pair<std::vector<std::string>, std::vector<std::string>> carve_validation(
    const std::vector<std::string>& train_ids, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "validation fraction must lie in (0, 1)");
  }
  const std::size_t n = train_ids.size();
  if (n == 0) return {};
  auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<char> is_val(n, 0);
  for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = 1;

  std::vector<std::string> train, val;
  train.reserve(n - n_val);
  val.reserve(n_val);
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? val : train).push_back(train_ids[i]);
  return {std::move(train), std::move(val)};
}

}  // namespace reqfuse
