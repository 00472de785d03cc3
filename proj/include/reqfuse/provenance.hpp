#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace reqfuse {

/// Pair ids whose data contributed to a fitted artifact. The cross-validation
/// driver checks these against the held-out fold.
class Provenance {
 public:
  Provenance() = default;
  explicit Provenance(std::vector<std::string> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  bool contains(std::string_view id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id, std::less<>{});
  }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  bool empty() const noexcept { return ids_.empty(); }

 private:
  std::vector<std::string> ids_;
};

}  // namespace reqfuse
