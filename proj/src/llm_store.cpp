#include "reqfuse/llm_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"

namespace reqfuse {

std::string_view to_string(LlmModel model) noexcept {
  switch (model) {
    case LlmModel::ALBERT: return "ALBERT";
    case LlmModel::BART: return "BART";
    case LlmModel::BERT: return "BERT";
    case LlmModel::DeBERTa: return "DeBERTa";
    case LlmModel::Electra: return "Electra";
    case LlmModel::GPT: return "GPT";
    case LlmModel::Longformer: return "Longformer";
    case LlmModel::RoBERTa: return "RoBERTa";
    case LlmModel::XLM: return "XLM";
    case LlmModel::XLNet: return "XLNet";
  }
  return "?";
}

std::optional<LlmModel> parse_llm_model(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const auto wanted = lower(name);
  for (LlmModel m : kSimModels)
    if (lower(to_string(m)) == wanted) return m;
  return std::nullopt;
}

bool has_cls(LlmModel model) noexcept {
  return std::find(kClsModels.begin(), kClsModels.end(), model) != kClsModels.end();
}

void EmbeddingStore::add(StoreRecord record) {
  Key key{record.pair_id, static_cast<int>(record.model), static_cast<int>(record.kind)};
  if (records_.contains(key)) {
    throw Error(ErrorCode::DuplicateKey, "(" + record.pair_id + ", " + std::string(to_string(record.model)) + ", " +
                                             (record.kind == RecordKind::Sim ? "sim" : "cls") + ")");
  }
  if (record.kind == RecordKind::Cls) {
    const int m = static_cast<int>(record.model);
    auto [it, inserted] = cls_dims_.try_emplace(m, record.values.size());
    if (!inserted && it->second != record.values.size()) {
      throw Error(ErrorCode::DimInconsistent, std::string(to_string(record.model)) + " CLS dim " +
                                                  std::to_string(record.values.size()) + " vs " +
                                                  std::to_string(it->second));
    }
  }
  records_.emplace(std::move(key), std::move(record));
}

std::optional<double> EmbeddingStore::sim(std::string_view pair_id, LlmModel model) const {
  auto it = records_.find(Key{std::string(pair_id), static_cast<int>(model), static_cast<int>(RecordKind::Sim)});
  if (it == records_.end()) return std::nullopt;
  return it->second.values.front();
}

const std::vector<double>* EmbeddingStore::cls(std::string_view pair_id, LlmModel model) const {
  auto it = records_.find(Key{std::string(pair_id), static_cast<int>(model), static_cast<int>(RecordKind::Cls)});
  return it == records_.end() ? nullptr : &it->second.values;
}

std::optional<std::size_t> EmbeddingStore::cls_dim(LlmModel model) const {
  auto it = cls_dims_.find(static_cast<int>(model));
  if (it == cls_dims_.end()) return std::nullopt;
  return it->second;
}

std::vector<const StoreRecord*> EmbeddingStore::records() const {
  std::vector<const StoreRecord*> out;
  out.reserve(records_.size());
  for (const auto& [key, rec] : records_) out.push_back(&rec);
  return out;
}

namespace {

StoreRecord parse_record(std::string_view line, std::size_t line_no) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + why);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (!j.is_object()) throw fail("not a JSON object");
  for (const char* field : {"pair_id", "model", "kind", "values"})
    if (!j.contains(field)) throw fail(std::string("missing '") + field + "'");
  if (!j["pair_id"].is_string() || !j["model"].is_string() || !j["kind"].is_string() || !j["values"].is_array()) {
    throw fail("field has the wrong type");
  }
  StoreRecord rec;
  rec.pair_id = j["pair_id"].get<std::string>();
  if (rec.pair_id.empty()) throw fail("empty pair_id");
  auto model = parse_llm_model(j["model"].get<std::string>());
  if (!model) throw fail("unknown model '" + j["model"].get<std::string>() + "'");
  rec.model = *model;
  const auto kind = j["kind"].get<std::string>();
  if (kind == "sim") {
    rec.kind = RecordKind::Sim;
  } else if (kind == "cls") {
    rec.kind = RecordKind::Cls;
  } else {
    throw fail("kind must be 'sim' or 'cls'");
  }
  for (const auto& v : j["values"]) {
    if (!v.is_number()) throw fail("non-numeric value");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw fail("non-finite value");
    rec.values.push_back(x);
  }
  if (rec.kind == RecordKind::Sim && rec.values.size() != 1) throw fail("sim records carry exactly one value");
  if (rec.kind == RecordKind::Cls && rec.values.empty()) throw fail("empty CLS vector");
  if (j.contains("meta")) rec.meta_json = j["meta"].dump();
  return rec;
}

}  // namespace

EmbeddingStore parse_store(std::string_view text) {
  EmbeddingStore store;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    store.add(parse_record(line, line_no));
  }
  return store;
}

EmbeddingStore load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_store(buffer.str());
}

std::string format_record(const StoreRecord& record) {
  std::string line = "{\"pair_id\":" + nlohmann::json(record.pair_id).dump() + ",\"model\":\"" +
                     std::string(to_string(record.model)) + "\",\"kind\":\"" +
                     (record.kind == RecordKind::Sim ? "sim" : "cls") + "\",\"values\":[";
  for (std::size_t i = 0; i < record.values.size(); ++i) {
    if (i) line.push_back(',');
    line += csv::format_double(record.values[i]);
  }
  line += "]";
  if (!record.meta_json.empty()) line += ",\"meta\":" + record.meta_json;
  line += "}";
  return line;
}

void write_store(const EmbeddingStore& store, std::ostream& out) {
  for (const auto* rec : store.records()) out << format_record(*rec) << '\n';
}

std::string format_store(const EmbeddingStore& store) {
  std::ostringstream out;
  write_store(store, out);
  return out.str();
}

LlmSimVector llm_sim_vector(std::string_view pair_id, const EmbeddingStore& store) {
  LlmSimVector out{};
  for (std::size_t i = 0; i < kSimModels.size(); ++i) {
    auto s = store.sim(pair_id, kSimModels[i]);
    if (!s) {
      throw Error(ErrorCode::MissingScore, "pair '" + std::string(pair_id) + "' has no " +
                                               std::string(to_string(kSimModels[i])) + " score");
    }
    out[i] = *s;
  }
  return out;
}

const std::vector<double>& cls_embedding(std::string_view pair_id, LlmModel model, const EmbeddingStore& store) {
  const auto* v = store.cls(pair_id, model);
  if (!v) {
    throw Error(ErrorCode::MissingEmbedding, "pair '" + std::string(pair_id) + "' has no " +
                                                 std::string(to_string(model)) + " CLS embedding");
  }
  return *v;
}

}  // namespace reqfuse
