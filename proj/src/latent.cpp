#include "reqfuse/latent.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "reqfuse/error.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {

std::string_view to_string(LatentKind kind) noexcept {
  switch (kind) {
    case LatentKind::LSI: return "LSI";
    case LatentKind::NMF: return "NMF";
    case LatentKind::LDA: return "LDA";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kInferenceStream = 0x1DAF00D;

Eigen::MatrixXd to_dense(const std::vector<SparseTermVector>& rows, std::size_t dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [i, w] : rows[r].entries) a(static_cast<Eigen::Index>(r), i) = w;
  return a;
}

Eigen::VectorXd to_dense(const SparseTermVector& u) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.dim));
  for (const auto& [i, w] : u.entries) v(i) = w;
  return v;
}

// Flip each column so its largest-magnitude entry is positive.
void normalize_column_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index arg = 0;
    m.col(c).cwiseAbs().maxCoeff(&arg);
    if (m(arg, c) < 0.0) m.col(c) *= -1.0;
  }
}

void fit_lsi(const Eigen::MatrixXd& a, std::size_t k, Eigen::MatrixXd& basis, Eigen::VectorXd& sv) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const auto kk = static_cast<Eigen::Index>(k);
  basis = svd.matrixV().leftCols(kk);
  sv = svd.singularValues().head(kk);
  normalize_column_signs(basis);
}

double frobenius_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w, const Eigen::MatrixXd& h) {
  return (a - w * h).norm();
}

// Lee & Seung multiplicative updates for min ||A - WH||_F with W, H >= 0.
void fit_nmf(const Eigen::MatrixXd& a, const LatentParams& params, Eigen::MatrixXd& w, Eigen::MatrixXd& h,
             std::vector<double>& trace) {
  const auto docs = a.rows();
  const auto vocab = a.cols();
  const auto k = static_cast<Eigen::Index>(params.k);
  Rng rng(params.seed);
  const double scale = std::sqrt(std::max(a.mean(), 1e-12) / static_cast<double>(k));
  w.resize(docs, k);
  h.resize(k, vocab);
  for (Eigen::Index i = 0; i < docs; ++i)
    for (Eigen::Index j = 0; j < k; ++j) w(i, j) = scale * rng.uniform();
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < vocab; ++j) h(i, j) = scale * rng.uniform();

  constexpr double eps = std::numeric_limits<double>::min();
  trace.assign(1, frobenius_error(a, w, h));
  for (int iter = 0; iter < params.max_iter; ++iter) {
    const Eigen::MatrixXd wt_a = w.transpose() * a;
    const Eigen::MatrixXd wt_w_h = (w.transpose() * w) * h;
    h = h.cwiseProduct(wt_a.cwiseQuotient((wt_w_h.array() + eps).matrix()));

    const Eigen::MatrixXd a_ht = a * h.transpose();
    const Eigen::MatrixXd w_h_ht = w * (h * h.transpose());
    w = w.cwiseProduct(a_ht.cwiseQuotient((w_h_ht.array() + eps).matrix()));

    const double prev = trace.back();
    const double err = frobenius_error(a, w, h);
    trace.push_back(err);
    if (prev <= 0.0) break;
    if (params.tol > 0.0 && (prev - err) / prev < params.tol) break;
  }
}

struct GibbsDoc {
  std::vector<std::uint32_t> terms;
  std::vector<int> topics;
};

std::vector<std::uint32_t> expand_tokens(const SparseTermVector& u, int quantization) {
  std::vector<std::uint32_t> tokens;
  for (const auto& [term, count] : quantize_weights(u, quantization))
    tokens.insert(tokens.end(), static_cast<std::size_t>(count), term);
  return tokens;
}

int sample_index(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

// Collapsed Gibbs sampling; returns phi (k x vocab) from the final counts.
Eigen::MatrixXd fit_lda(const std::vector<SparseTermVector>& matrix, std::size_t vocab, const LatentParams& params,
                        double alpha) {
  const auto k = static_cast<int>(params.k);
  const double beta = params.beta;
  const double vbeta = static_cast<double>(vocab) * beta;
  Rng rng(params.seed);

  std::vector<GibbsDoc> docs(matrix.size());
  std::vector<std::vector<int>> n_dk(matrix.size(), std::vector<int>(static_cast<std::size_t>(k), 0));
  Eigen::MatrixXi n_kt = Eigen::MatrixXi::Zero(k, static_cast<Eigen::Index>(vocab));
  std::vector<int> n_k(static_cast<std::size_t>(k), 0);

  for (std::size_t d = 0; d < matrix.size(); ++d) {
    docs[d].terms = expand_tokens(matrix[d], params.quantization);
    docs[d].topics.resize(docs[d].terms.size());
    for (std::size_t i = 0; i < docs[d].terms.size(); ++i) {
      const int z = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      docs[d].topics[i] = z;
      ++n_dk[d][static_cast<std::size_t>(z)];
      ++n_kt(z, docs[d].terms[i]);
      ++n_k[static_cast<std::size_t>(z)];
    }
  }

  std::vector<double> cumulative(static_cast<std::size_t>(k));
  for (int sweep = 0; sweep < params.max_iter; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      auto& doc = docs[d];
      for (std::size_t i = 0; i < doc.terms.size(); ++i) {
        const auto t = doc.terms[i];
        int z = doc.topics[i];
        --n_dk[d][static_cast<std::size_t>(z)];
        --n_kt(z, t);
        --n_k[static_cast<std::size_t>(z)];
        double total = 0.0;
        for (int c = 0; c < k; ++c) {
          const auto cu = static_cast<std::size_t>(c);
          total += (n_dk[d][cu] + alpha) * (n_kt(c, t) + beta) / (n_k[cu] + vbeta);
          cumulative[cu] = total;
        }
        z = sample_index(rng, cumulative);
        doc.topics[i] = z;
        ++n_dk[d][static_cast<std::size_t>(z)];
        ++n_kt(z, t);
        ++n_k[static_cast<std::size_t>(z)];
      }
    }
  }

  Eigen::MatrixXd phi(k, static_cast<Eigen::Index>(vocab));
  for (int c = 0; c < k; ++c) {
    const double denom = n_k[static_cast<std::size_t>(c)] + vbeta;
    for (Eigen::Index t = 0; t < phi.cols(); ++t) phi(c, t) = (n_kt(c, t) + beta) / denom;
  }
  return phi;
}

template <typename T>
void append_raw(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void append_matrix(std::string& out, const Eigen::MatrixXd& m) {
  append_raw(out, static_cast<std::int64_t>(m.rows()));
  append_raw(out, static_cast<std::int64_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) append_raw(out, m(r, c));
}

}  // namespace

std::vector<std::pair<std::uint32_t, int>> quantize_weights(const SparseTermVector& u, int quantization) {
  std::vector<std::pair<std::uint32_t, int>> counts;
  double max_w = 0.0;
  for (const auto& e : u.entries) max_w = std::max(max_w, e.second);
  if (max_w <= 0.0) return counts;
  for (const auto& [term, w] : u.entries) {
    const auto c = static_cast<int>(std::lround(static_cast<double>(quantization) * w / max_w));
    if (c > 0) counts.emplace_back(term, c);
  }
  return counts;
}

LatentModel fit_latent(LatentKind kind, const std::vector<SparseTermVector>& matrix, const LatentParams& params,
                       Provenance provenance) {
  if (matrix.empty()) throw Error(ErrorCode::EmptyMatrix, "no documents to factorize");
  const std::size_t vocab = matrix.front().dim;
  for (const auto& row : matrix)
    if (row.dim != vocab) throw Error(ErrorCode::DimMismatch, "documents use different vocabularies");
  if (vocab == 0) throw Error(ErrorCode::EmptyMatrix, "empty vocabulary");
  if (params.k < 1 || params.k > std::min(matrix.size(), vocab)) {
    throw Error(ErrorCode::RankTooLarge, "k = " + std::to_string(params.k) + " exceeds min(" +
                                             std::to_string(matrix.size()) + " docs, " + std::to_string(vocab) +
                                             " terms)");
  }
  if (kind == LatentKind::LDA && (params.beta <= 0.0 || params.quantization < 1 || params.infer_sweeps < 1)) {
    throw Error(ErrorCode::InvalidArgument, "LDA needs beta > 0, quantization >= 1 and infer_sweeps >= 1");
  }

  LatentModel model;
  model.kind_ = kind;
  model.k_ = params.k;
  model.vocab_ = vocab;
  model.params_ = params;
  model.provenance_ = std::move(provenance);

  switch (kind) {
    case LatentKind::LSI: {
      fit_lsi(to_dense(matrix, vocab), params.k, model.factors_, model.singular_values_);
      model.projector_ = model.factors_.transpose();
      break;
    }
    case LatentKind::NMF: {
      Eigen::MatrixXd w, h;
      fit_nmf(to_dense(matrix, vocab), params, w, h, model.objective_trace_);
      model.factors_ = h;
      model.doc_factors_ = w;
      model.projector_ = h.transpose().completeOrthogonalDecomposition().pseudoInverse();
      break;
    }
    case LatentKind::LDA: {
      model.alpha_ = params.alpha > 0.0 ? params.alpha : 50.0 / static_cast<double>(params.k);
      model.factors_ = fit_lda(matrix, vocab, params, model.alpha_);
      break;
    }
  }
  return model;
}

std::vector<double> LatentModel::infer_topics(const SparseTermVector& u) const {
  const auto k = static_cast<int>(k_);
  const auto tokens = expand_tokens(u, params_.quantization);
  std::vector<double> theta(k_, 0.0);
  if (tokens.empty()) {
    std::fill(theta.begin(), theta.end(), 1.0 / static_cast<double>(k_));
    return theta;
  }
  Rng rng(derive_seed(params_.seed, kInferenceStream));
  std::vector<int> topics(tokens.size());
  std::vector<int> n_dk(k_, 0);
  for (auto& z : topics) {
    z = static_cast<int>(rng.below(k_));
    ++n_dk[static_cast<std::size_t>(z)];
  }

  const int sweeps = params_.infer_sweeps;
  const int burn_in = sweeps / 2;
  const double denom = static_cast<double>(tokens.size()) + static_cast<double>(k_) * alpha_;
  std::vector<double> cumulative(k_);
  int samples = 0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      --n_dk[static_cast<std::size_t>(topics[i])];
      double total = 0.0;
      for (int c = 0; c < k; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        total += (n_dk[cu] + alpha_) * factors_(c, tokens[i]);
        cumulative[cu] = total;
      }
      topics[i] = sample_index(rng, cumulative);
      ++n_dk[static_cast<std::size_t>(topics[i])];
    }
    if (sweep >= burn_in) {
      for (std::size_t c = 0; c < k_; ++c) theta[c] += (n_dk[c] + alpha_) / denom;
      ++samples;
    }
  }
  for (auto& t : theta) t /= samples;
  return theta;
}

std::vector<double> LatentModel::project(const SparseTermVector& u) const {
  if (u.dim != vocab_) {
    throw Error(ErrorCode::DimMismatch, "vector dim " + std::to_string(u.dim) + " vs model vocabulary " +
                                            std::to_string(vocab_));
  }
  if (kind_ == LatentKind::LDA) return infer_topics(u);
  std::vector<double> z(k_, 0.0);
  for (const auto& [i, w] : u.entries)
    for (std::size_t c = 0; c < k_; ++c) z[c] += projector_(static_cast<Eigen::Index>(c), i) * w;
  return z;
}

std::vector<double> LatentModel::reconstruct(std::span<const double> coords) const {
  if (coords.size() != k_) throw Error(ErrorCode::DimMismatch, "latent coordinate count differs from k");
  const Eigen::Map<const Eigen::VectorXd> z(coords.data(), static_cast<Eigen::Index>(coords.size()));
  Eigen::VectorXd x = kind_ == LatentKind::LSI ? Eigen::VectorXd(factors_ * z)
                                               : Eigen::VectorXd(factors_.transpose() * z);
  return {x.data(), x.data() + x.size()};
}

std::string LatentModel::to_bytes() const {
  std::string out;
  append_raw(out, static_cast<std::int32_t>(kind_));
  append_raw(out, static_cast<std::uint64_t>(k_));
  append_raw(out, static_cast<std::uint64_t>(vocab_));
  append_raw(out, params_.seed);
  append_raw(out, alpha_);
  append_matrix(out, factors_);
  append_matrix(out, projector_);
  append_matrix(out, Eigen::MatrixXd(singular_values_));
  append_matrix(out, doc_factors_);
  for (double e : objective_trace_) append_raw(out, e);
  return out;
}

SimilarityScore latent_similarity(const LatentModel& model, const SparseTermVector& u, const SparseTermVector& v,
                                  Representation rep) {
  const SimilarityMethod method = model.kind() == LatentKind::LSI   ? SimilarityMethod::LSI
                                  : model.kind() == LatentKind::NMF ? SimilarityMethod::NMF
                                                                    : SimilarityMethod::LDA;
  if (u.dim != model.vocab_size() || v.dim != model.vocab_size()) {
    throw Error(ErrorCode::DimMismatch, "vectors do not match the model vocabulary");
  }
  SimilarityScore score{0.0, method, rep};
  if (u.empty() || v.empty()) return score;
  const auto pu = model.project(u);
  const auto pv = model.project(v);
  if (model.kind() == LatentKind::LDA) {
    score.value = std::clamp(1.0 - jensen_shannon_divergence(pu, pv), 0.0, 1.0);
  } else {
    score.value = dense_cosine(pu, pv);
  }
  return score;
}

}  // namespace reqfuse
