#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace reqfuse {

/// Canonical (alphabetical) order of the language models whose pairwise
/// similarity scores make up the LLM block.
enum class LlmModel { ALBERT, BART, BERT, DeBERTa, Electra, GPT, Longformer, RoBERTa, XLM, XLNet };

inline constexpr std::array<LlmModel, 10> kSimModels = {
    LlmModel::ALBERT, LlmModel::BART,       LlmModel::BERT,    LlmModel::DeBERTa, LlmModel::Electra,
    LlmModel::GPT,    LlmModel::Longformer, LlmModel::RoBERTa, LlmModel::XLM,     LlmModel::XLNet};

/// Models that contribute CLS embeddings (the similarity set minus BART and XLM).
inline constexpr std::array<LlmModel, 8> kClsModels = {LlmModel::ALBERT,  LlmModel::BERT,       LlmModel::DeBERTa,
                                                       LlmModel::Electra, LlmModel::GPT,        LlmModel::Longformer,
                                                       LlmModel::RoBERTa, LlmModel::XLNet};

std::string_view to_string(LlmModel model) noexcept;
/// Case-insensitive match against the canonical names.
std::optional<LlmModel> parse_llm_model(std::string_view name);
bool has_cls(LlmModel model) noexcept;

enum class RecordKind { Sim, Cls };

struct StoreRecord {
  std::string pair_id;
  LlmModel model = LlmModel::ALBERT;
  RecordKind kind = RecordKind::Sim;
  std::vector<double> values;
  std::string meta_json;  // serialized "meta" object, empty when absent
};

using LlmSimVector = std::array<double, kSimModels.size()>;

/// Read-only index of LLM-derived knowledge keyed by (pair, model, kind).
class EmbeddingStore {
 public:
  /// Throws DuplicateKey for a repeated key and DimInconsistent when a CLS
  /// vector's length differs from earlier vectors of the same model.
  void add(StoreRecord record);

  std::optional<double> sim(std::string_view pair_id, LlmModel model) const;
  const std::vector<double>* cls(std::string_view pair_id, LlmModel model) const;
  std::optional<std::size_t> cls_dim(LlmModel model) const;

  std::size_t size() const noexcept { return records_.size(); }
  /// Records in (pair_id, model, kind) order.
  std::vector<const StoreRecord*> records() const;

 private:
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, StoreRecord> records_;
  std::map<int, std::size_t> cls_dims_;
};

EmbeddingStore parse_store(std::string_view text);
EmbeddingStore load_store(const std::string& path);

/// One JSON object per line; every float printed with 17 significant digits.
std::string format_record(const StoreRecord& record);
void write_store(const EmbeddingStore& store, std::ostream& out);
std::string format_store(const EmbeddingStore& store);

/// The ten similarity scores of one pair in canonical model order.
LlmSimVector llm_sim_vector(std::string_view pair_id, const EmbeddingStore& store);
const std::vector<double>& cls_embedding(std::string_view pair_id, LlmModel model, const EmbeddingStore& store);

}  // namespace reqfuse
