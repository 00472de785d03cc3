#include "reqfuse/fusion.hpp"

#include <algorithm>
#include <cctype>

#include "reqfuse/error.hpp"
#include "reqfuse/pca.hpp"

namespace reqfuse {

std::string_view to_string(FeatureBlock block) noexcept {
  switch (block) {
    case FeatureBlock::CLS: return "CLS";
    case FeatureBlock::TFIDF: return "TFIDF";
    case FeatureBlock::BM25: return "BM25";
    case FeatureBlock::LLM: return "LLM";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

FusionStrategy FusionStrategy::parse(std::string_view text) {
  FusionStrategy s;
  const std::string spec = upper(text);
  auto bad = [&](const std::string& why) { return Error(ErrorCode::BadConfig, "fusion '" + std::string(text) + "': " + why); };
  std::size_t pos = 0;
  int position = 0;
  while (pos <= spec.size()) {
    auto end = spec.find('+', pos);
    if (end == std::string::npos) end = spec.size();
    const std::string part = spec.substr(pos, end - pos);
    pos = end + 1;
    if (part.empty()) throw bad("empty component");
    if (part.rfind("CLS(", 0) == 0 && part.back() == ')') {
      if (position != 0) throw bad("CLS must come first");
      const auto digits = part.substr(4, part.size() - 5);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) throw bad("bad CLS dim");
      s.cls_dim = std::stoul(digits);
      if (!is_valid_pca_dim(s.cls_dim)) throw bad("CLS dim must be one of 8/16/32/64/128");
    } else if (part == "TFIDF" || part == "TF-IDF") {
      if (s.tfidf) throw bad("TFIDF repeated");
      s.tfidf = true;
    } else if (part == "BM25" || part == "OKAPIBM25" || part == "OKAPI-BM25" || part == "OKAPI") {
      if (s.bm25) throw bad("BM25 repeated");
      s.bm25 = true;
    } else if (part == "LLM") {
      if (s.llm) throw bad("LLM repeated");
      s.llm = true;
    } else {
      throw bad("unknown block '" + part + "'");
    }
    ++position;
    if (end == spec.size()) break;
  }
  if (!s.tfidf && !s.bm25 && !s.llm) throw bad("needs at least one similarity block");
  return s;
}

std::string FusionStrategy::name() const {
  std::vector<std::string> parts;
  if (cls_dim) parts.push_back("CLS(" + std::to_string(cls_dim) + ")");
  if (tfidf) parts.emplace_back("TFIDF");
  if (bm25) parts.emplace_back("BM25");
  if (llm) parts.emplace_back("LLM");
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + parts[i];
  return out;
}

std::size_t FusionStrategy::dim() const noexcept {
  return cls_dim + (tfidf ? kMethodCount : 0) + (bm25 ? kMethodCount : 0) + (llm ? kSimModels.size() : 0);
}

const std::array<FusionStrategy, 7>& similarity_strategies() {
  static const std::array<FusionStrategy, 7> all = {{
      {true, false, false, 0},
      {false, true, false, 0},
      {false, false, true, 0},
      {true, true, false, 0},
      {true, false, true, 0},
      {false, true, true, 0},
      {true, true, true, 0},
  }};
  return all;
}

std::vector<LayoutSpan> layout_of(const FusionStrategy& strategy) {
  std::vector<LayoutSpan> layout;
  std::size_t offset = 0;
  auto add = [&](FeatureBlock b, std::size_t len) {
    layout.push_back({b, offset, len});
    offset += len;
  };
  if (strategy.cls_dim) add(FeatureBlock::CLS, strategy.cls_dim);
  if (strategy.tfidf) add(FeatureBlock::TFIDF, kMethodCount);
  if (strategy.bm25) add(FeatureBlock::BM25, kMethodCount);
  if (strategy.llm) add(FeatureBlock::LLM, kSimModels.size());
  return layout;
}

std::vector<std::string> column_names(const FusionStrategy& strategy) {
  std::vector<std::string> names;
  for (const auto& span : layout_of(strategy)) {
    const std::string prefix = lower(to_string(span.block)) + "_";
    for (std::size_t i = 0; i < span.length; ++i) {
      switch (span.block) {
        case FeatureBlock::CLS: names.push_back(prefix + std::to_string(i)); break;
        case FeatureBlock::TFIDF:
        case FeatureBlock::BM25: names.push_back(prefix + lower(to_string(kAllMethods[i]))); break;
        case FeatureBlock::LLM: names.push_back(prefix + lower(to_string(kSimModels[i]))); break;
      }
    }
  }
  return names;
}

FusedFeatureVector fuse(const FusionStrategy& strategy, const FeatureInputs& inputs) {
  FusedFeatureVector out;
  out.layout = layout_of(strategy);
  out.values.reserve(strategy.dim());
  auto missing = [](FeatureBlock b) {
    return Error(ErrorCode::MissingBlock, std::string(to_string(b)) + " block required by the strategy is absent");
  };
  for (const auto& span : out.layout) {
    switch (span.block) {
      case FeatureBlock::CLS:
        if (!inputs.cls) throw missing(span.block);
        if (inputs.cls->size() != span.length) {
          throw Error(ErrorCode::DimMismatch, "CLS block has " + std::to_string(inputs.cls->size()) +
                                                  " values, strategy wants " + std::to_string(span.length));
        }
        out.values.insert(out.values.end(), inputs.cls->begin(), inputs.cls->end());
        break;
      case FeatureBlock::TFIDF:
        if (!inputs.tfidf) throw missing(span.block);
        out.values.insert(out.values.end(), inputs.tfidf->begin(), inputs.tfidf->end());
        break;
      case FeatureBlock::BM25:
        if (!inputs.bm25) throw missing(span.block);
        out.values.insert(out.values.end(), inputs.bm25->begin(), inputs.bm25->end());
        break;
      case FeatureBlock::LLM:
        if (!inputs.llm) throw missing(span.block);
        out.values.insert(out.values.end(), inputs.llm->begin(), inputs.llm->end());
        break;
    }
  }
  return out;
}

}  // namespace reqfuse
