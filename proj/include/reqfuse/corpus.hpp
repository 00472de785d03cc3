#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace reqfuse {

struct Requirement {
  std::string id;
  std::string text;
};

enum class PairLabel { Conflict = 0, Duplicate = 1, Neutral = 2 };

inline constexpr int kLabelCount = 3;

std::string_view to_string(PairLabel label) noexcept;
/// Case-insensitive; std::nullopt for anything outside conflict/duplicate/neutral.
std::optional<PairLabel> parse_label(std::string_view text);

struct RequirementPair {
  std::string pair_id;
  Requirement left;
  Requirement right;
  PairLabel label = PairLabel::Neutral;
};

/// Ordered, validated collection of labelled pairs. Immutable once built.
class PairDataset {
 public:
  /// Validates non-emptiness, unique pair ids and a single positive class.
  /// When no positive label occurs, `fallback_positive` is used.
  PairDataset(std::string name, std::vector<RequirementPair> pairs,
              PairLabel fallback_positive = PairLabel::Conflict);

  const std::string& name() const noexcept { return name_; }
  const std::vector<RequirementPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  const RequirementPair& operator[](std::size_t i) const { return pairs_[i]; }
  PairLabel positive_class() const noexcept { return positive_; }

  std::optional<std::size_t> index_of(std::string_view pair_id) const;
  std::size_t count(PairLabel label) const;

 private:
  std::string name_;
  std::vector<RequirementPair> pairs_;
  PairLabel positive_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr const char* kPairsHeader[] = {"pair_id", "req1_id", "req1_text",
                                               "req2_id", "req2_text", "label"};

PairDataset parse_pairs(std::string_view text, std::string name = "dataset");
PairDataset load_pairs(const std::string& path);
/// Canonical form: fixed header, minimal quoting, lowercase labels, LF endings.
void write_pairs(const PairDataset& ds, std::ostream& out);
std::string format_pairs(const PairDataset& ds);

/// Stratified assignment of dataset positions to folds.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> pair_ids;  // dataset order
  std::vector<int> fold_of;           // parallel to pair_ids

  int fold(std::string_view pair_id) const;
  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Per-label seeded shuffle followed by one round-robin pass that continues
/// across labels, so both per-label and total fold sizes differ by at most one.
FoldPlan stratified_kfold(const PairDataset& ds, int k, std::uint64_t seed);

/// Same assignment rule over bare integer labels; used for inner folds.
std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int k, std::uint64_t seed);

/// Splits off round(fraction * n) ids (at least one) as a validation set.
/// Both outputs keep the input order.
std::pair<std::vector<std::string>, std::vector<std::string>> carve_validation(
    const std::vector<std::string>& train_ids, double fraction, std::uint64_t seed);

}  // namespace reqfuse
