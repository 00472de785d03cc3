#include "reqfuse/config.hpp"

#include <fstream>
#include <sstream>

#include "reqfuse/error.hpp"

namespace reqfuse {

using nlohmann::json;

std::string_view to_string(Family family) noexcept {
  return family == Family::Similarity ? "SIMILARITY" : "HYBRID";
}

namespace {

// Map-valued keys: their children are user-defined names, not config keys.
bool is_map_key(const std::string& key) { return key == "classifier.params" || key == "search.space"; }

void flatten_into(const json& node, const std::string& prefix, json& flat) {
  if (node.is_object() && !is_map_key(prefix)) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), flat);
    }
    return;
  }
  // "classifier.params.k" style keys fold back into their map.
  for (const char* map_key : {"classifier.params", "search.space"}) {
    const std::string head = std::string(map_key) + ".";
    if (prefix.rfind(head, 0) == 0) {
      flat[map_key][prefix.substr(head.size())] = node;
      return;
    }
  }
  if (is_map_key(prefix) && flat.contains(prefix)) {
    for (auto it = node.begin(); it != node.end(); ++it) flat[prefix][it.key()] = it.value();
    return;
  }
  flat[prefix] = node;
}

json flatten(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::BadConfig, "config must be a JSON object");
  json flat = json::object();
  flatten_into(doc, "", flat);
  return flat;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::BadConfig, "config key '" + key + "': " + what);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == static_cast<int>(v.get<double>())))
    bad(key, "expected an integer");
  return static_cast<int>(v.get<double>());
}

std::uint64_t seed_value(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  bad(key, "expected a non-negative integer");
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

ParamRange parse_range(const json& v, const std::string& key) {
  if (v.is_array()) {
    std::vector<double> choices;
    for (const auto& c : v) choices.push_back(number(c, key));
    if (choices.empty()) throw Error(ErrorCode::EmptySpace, "search space entry '" + key + "' has no choices");
    return ParamRange::choice(std::move(choices));
  }
  if (!v.is_object()) bad(key, "expected a list of choices or {lo, hi}");
  ParamRange r;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (it.key() == "lo") r.lo = number(it.value(), key + ".lo");
    else if (it.key() == "hi") r.hi = number(it.value(), key + ".hi");
    else if (it.key() == "log") r.log = boolean(it.value(), key + ".log");
    else if (it.key() == "integer") r.integer = boolean(it.value(), key + ".integer");
    else bad(key + "." + it.key(), "unknown range field");
  }
  if (!v.contains("lo") || !v.contains("hi")) bad(key, "range needs lo and hi");
  return r;
}

json range_to_json(const ParamRange& r) {
  if (!r.choices.empty()) return r.choices;
  return {{"lo", r.lo}, {"hi", r.hi}, {"log", r.log}, {"integer", r.integer}};
}

void set_latent(LatentParams& p, const std::string& field, const json& v, const std::string& key, bool lda) {
  if (field == "k") {
    const int k = integer(v, key);
    if (k < 1) bad(key, "must be at least 1");
    p.k = static_cast<std::size_t>(k);
  } else if (field == "max_iter" || (lda && field == "sweeps")) {
    p.max_iter = integer(v, key);
  } else if (field == "tol") {
    p.tol = number(v, key);
  } else if (lda && field == "alpha") {
    p.alpha = number(v, key);
  } else if (lda && field == "beta") {
    p.beta = number(v, key);
  } else if (lda && field == "infer_sweeps") {
    p.infer_sweeps = integer(v, key);
  } else if (lda && field == "quantization") {
    p.quantization = integer(v, key);
  } else {
    bad(key, "unknown key");
  }
}

json latent_to_json(const LatentParams& p, LatentKind kind) {
  json j = {{"k", p.k}};
  if (kind == LatentKind::NMF) {
    j["max_iter"] = p.max_iter;
    j["tol"] = p.tol;
  }
  if (kind == LatentKind::LDA) {
    j["max_iter"] = p.max_iter;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["infer_sweeps"] = p.infer_sweeps;
    j["quantization"] = p.quantization;
  }
  return j;
}

}  // namespace

PipelineConfig parse_config(const json& doc) {
  const json flat = flatten(doc);
  PipelineConfig cfg;
  bool fusion_given = false;
  std::optional<std::string> plugin;

  for (auto it = flat.begin(); it != flat.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "family") {
      const std::string f = upper(text(v, key));
      if (f == "SIMILARITY") cfg.family = Family::Similarity;
      else if (f == "HYBRID") cfg.family = Family::Hybrid;
      else bad(key, "expected SIMILARITY or HYBRID");
    } else if (key == "fusion") {
      cfg.fusion = FusionStrategy::parse(text(v, key));
      fusion_given = true;
    } else if (key == "cls_model") {
      if (v.is_null()) continue;
      auto m = parse_llm_model(text(v, key));
      if (!m) bad(key, "unknown model '" + v.get<std::string>() + "'");
      cfg.cls_model = *m;
    } else if (key == "classifier.algo") {
      const std::string name = text(v, key);
      if (auto a = parse_algorithm(name)) {
        cfg.classifier.algo = *a;
      } else {
        cfg.classifier.algo = Algorithm::Plugin;
        plugin = name;
      }
    } else if (key == "classifier.params") {
      if (!v.is_object()) bad(key, "expected an object");
      for (auto p = v.begin(); p != v.end(); ++p) cfg.classifier.params[p.key()] = number(p.value(), key + "." + p.key());
    } else if (key == "search.enabled") {
      cfg.search.enabled = boolean(v, key);
    } else if (key == "search.budget") {
      cfg.search.budget = integer(v, key);
      cfg.search.enabled = true;
    } else if (key == "search.objective") {
      cfg.search.objective = parse_objective(text(v, key));
    } else if (key == "search.folds") {
      cfg.search.folds = integer(v, key);
    } else if (key == "search.space") {
      if (!v.is_object()) bad(key, "expected an object");
      for (auto p = v.begin(); p != v.end(); ++p) cfg.search.space[p.key()] = parse_range(p.value(), key + "." + p.key());
    } else if (key == "rep.tokenize.lowercase") {
      cfg.traditional.tokenize.lowercase = boolean(v, key);
    } else if (key == "rep.tokenize.remove_stopwords") {
      cfg.traditional.tokenize.remove_stopwords = boolean(v, key);
    } else if (key == "rep.tokenize.stem") {
      cfg.traditional.tokenize.stem = boolean(v, key);
    } else if (key == "rep.tfidf.smooth_idf") {
      cfg.traditional.tfidf.smooth_idf = boolean(v, key);
    } else if (key == "rep.tfidf.sublinear_tf") {
      cfg.traditional.tfidf.sublinear_tf = boolean(v, key);
    } else if (key == "rep.tfidf.l2_normalize") {
      cfg.traditional.tfidf.l2_normalize = boolean(v, key);
    } else if (key == "rep.bm25.k1") {
      cfg.traditional.bm25.k1 = number(v, key);
    } else if (key == "rep.bm25.b") {
      cfg.traditional.bm25.b = number(v, key);
    } else if (key == "sim.seed") {
      if (!v.is_null()) cfg.sim_seed = seed_value(v, key);
    } else if (key.rfind("sim.lsi.", 0) == 0) {
      if (key != "sim.lsi.k") bad(key, "unknown key");
      set_latent(cfg.traditional.lsi, "k", v, key, false);
    } else if (key.rfind("sim.nmf.", 0) == 0) {
      const std::string field = key.substr(8);
      if (field != "k" && field != "max_iter" && field != "tol") bad(key, "unknown key");
      set_latent(cfg.traditional.nmf, field, v, key, false);
    } else if (key.rfind("sim.lda.", 0) == 0) {
      const std::string field = key.substr(8);
      if (field == "tol") bad(key, "unknown key");
      set_latent(cfg.traditional.lda, field, v, key, true);
    } else if (key == "cv.k") {
      cfg.cv_k = integer(v, key);
      if (cfg.cv_k < 2) bad(key, "must be at least 2");
    } else if (key == "cv.seed") {
      if (!v.is_null()) cfg.cv_seed = seed_value(v, key);
    } else if (key == "metrics.macro_f1") {
      cfg.macro_f1 = parse_macro_f1(text(v, key));
    } else if (key == "seed") {
      cfg.seed = seed_value(v, key);
    } else if (key == "dataset") {
      cfg.dataset = text(v, key);
    } else if (key == "store") {
      cfg.store = text(v, key);
    } else {
      bad(key, "unknown key");
    }
  }
  if (plugin) cfg.classifier.plugin = *plugin;
  if (cfg.family == Family::Hybrid && !fusion_given && cfg.fusion.cls_dim == 0) cfg.fusion.cls_dim = 16;
  if (cfg.search.budget < 1) bad("search.budget", "must be at least 1");
  if (cfg.search.folds < 2) bad("search.folds", "must be at least 2");
  return cfg;
}

PipelineConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const PipelineConfig& cfg) {
  json params = json::object();
  for (const auto& [k, v] : cfg.classifier.params) params[k] = v;
  json space = json::object();
  for (const auto& [k, r] : cfg.search.space) space[k] = range_to_json(r);
  const auto& t = cfg.traditional;
  return {
      {"family", to_string(cfg.family)},
      {"fusion", cfg.fusion.name()},
      {"cls_model", cfg.cls_model ? json(std::string(to_string(*cfg.cls_model))) : json(nullptr)},
      {"classifier", {{"algo", cfg.classifier.name()}, {"params", params}}},
      {"search",
       {{"enabled", cfg.search.enabled},
        {"budget", cfg.search.budget},
        {"objective", to_string(cfg.search.objective)},
        {"folds", cfg.search.folds},
        {"space", space}}},
      {"rep",
       {{"tokenize",
         {{"lowercase", t.tokenize.lowercase}, {"remove_stopwords", t.tokenize.remove_stopwords},
          {"stem", t.tokenize.stem}}},
        {"tfidf",
         {{"smooth_idf", t.tfidf.smooth_idf}, {"sublinear_tf", t.tfidf.sublinear_tf},
          {"l2_normalize", t.tfidf.l2_normalize}}},
        {"bm25", {{"k1", t.bm25.k1}, {"b", t.bm25.b}}}}},
      {"sim",
       {{"lsi", latent_to_json(t.lsi, LatentKind::LSI)},
        {"nmf", latent_to_json(t.nmf, LatentKind::NMF)},
        {"lda", latent_to_json(t.lda, LatentKind::LDA)},
        {"seed", cfg.sim_seed ? json(*cfg.sim_seed) : json(nullptr)}}},
      {"cv", {{"k", cfg.cv_k}, {"seed", cfg.cv_seed ? json(*cfg.cv_seed) : json(nullptr)}}},
      {"metrics", {{"macro_f1", to_string(cfg.macro_f1)}}},
      {"seed", cfg.seed},
      {"dataset", cfg.dataset},
      {"store", cfg.store},
  };
}

json merge_config(const json& base, const json& overlay) {
  json flat = flatten(base);
  const json top = flatten(overlay);
  for (auto it = top.begin(); it != top.end(); ++it) {
    if (is_map_key(it.key()) && flat.contains(it.key())) {
      for (auto p = it.value().begin(); p != it.value().end(); ++p) flat[it.key()][p.key()] = p.value();
    } else {
      flat[it.key()] = it.value();
    }
  }
  return flat;
}

}  // namespace reqfuse
