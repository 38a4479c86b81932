#pragma once

// Influence-function approximation of how GloVe word vectors, and the WEAT
// effect size computed from them, respond to removing co-occurrences.
//
// With u, b and c frozen the Hessian of the GloVe loss in w is block
// diagonal, one D x D block per word:
//
//   H_i = sum_j 2 f(X_ij) u_j u_j^T
//
// and a perturbed row X~_i moves w_i to
//
//   w~_i = w_i - H_i^{-1} [grad_i(X~_i) - grad_i(X_i)],
//   grad_i(X_i) = sum_j 2 f(X_ij) (w_i.u_j + b_i + c_j - log X_ij) u_j.
//
// Gradients and Hessians here are the per-row forms; the vocabulary-size
// factors of the averaged loss cancel between them.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "wordbias/cooc.hpp"
#include "wordbias/glove.hpp"
#include "wordbias/metrics.hpp"

namespace wordbias {

/// Relative damping floor: lambda >= kRelativeDamping * trace(H) / D.
inline constexpr double kRelativeDamping = 1e-8;

/// The cached, damped D x D system of one word.
class WordSystem {
 public:
  WordId word_id() const { return word_id_; }
  const Eigen::MatrixXd& hessian() const { return hessian_; }
  double damping_lambda() const { return lambda_; }

  /// (H + lambda I)^{-1} rhs.
  Vector solve(const Vector& rhs) const;
  /// L L^T from the cached factor.
  Eigen::MatrixXd reconstruct() const;

 private:
  friend WordSystem word_hessian(WordId, const SparseRow&, const Matrix&, const Hyperparams&, double);

  WordId word_id_ = 0;
  Eigen::MatrixXd hessian_;
  double lambda_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Builds H_i from row i of the unperturbed X and factors H_i + lambda I with
/// lambda = max(damping, kRelativeDamping * trace / D) (1e-8 when both are 0).
/// lambda grows 10x up to three times before giving up.
WordSystem word_hessian(WordId i, const SparseRow& row, const Matrix& u, const Hyperparams& hyper,
                        double damping = 0.0);

/// Per-row GloVe gradient in w_i over stored entries.
Vector pointwise_grad(const SparseRow& row, const Vector& w_i, double b_i, const Matrix& u, const Vector& c,
                      const Hyperparams& hyper);

/// Row i of X - delta, entries at or below kZeroTolerance dropped.
struct OwnedRow {
  std::vector<WordId> cols;
  std::vector<double> weights;
  SparseRow view() const { return {cols, weights}; }
};
OwnedRow perturb_row(const SparseRow& row, std::span<const CoocEntry> delta_row);

/// grad_i(X_i - delta_i) - grad_i(X_i), evaluated over the changed entries only.
Vector gradient_change(const SparseRow& row, std::span<const CoocEntry> delta_row, const Vector& w_i, double b_i,
                       const Matrix& u, const Vector& c, const Hyperparams& hyper);

/// w* - (H + lambda I)^{-1} (grad_after - grad_before).
Vector approx_perturbed_vector(const WordSystem& system, const Vector& w_star, const Vector& grad_before,
                               const Vector& grad_after);

/// One baseline model prepared for influence queries against one WEAT: the
/// WordSystems of every WEAT word, built once from the unperturbed X.
/// `x`, `model` and `spec` must outlive this object.
class WeatInfluence {
 public:
  WeatInfluence(const CoocMatrix& x, const GloveModel& model, const ResolvedWeat& spec, double damping = 0.0);

  const ResolvedWeat& spec() const { return *spec_; }
  const GloveModel& model() const { return *model_; }
  const CoocMatrix& cooc() const { return *x_; }
  /// B(w*).
  double baseline_bias() const { return baseline_; }
  /// Gathered WEAT vectors of w*.
  const Matrix& local() const { return local_; }
  /// System of the WEAT word at `position` in spec().words.
  const WordSystem& system(std::size_t position) const { return systems_[position]; }

  /// w~ for every WEAT word whose row the delta touches; nothing else moves.
  std::map<WordId, Vector> perturbed_vectors(const CoocDelta& delta) const;

  /// B(w*) - B(w~).
  double differential_bias(const CoocDelta& delta) const;

 private:
  const CoocMatrix* x_;
  const GloveModel* model_;
  const ResolvedWeat* spec_;
  Matrix local_;
  std::vector<WordSystem> systems_;
  double baseline_ = 0.0;
};

struct DiffBiasRecord {
  std::uint32_t doc_id = 0;
  /// One approximation per baseline model.
  std::vector<double> per_seed;
  double delta_b = 0.0;
  /// Sample standard deviation across models; absent for a single model.
  std::optional<double> delta_b_std;
  std::size_t weat_words_touched = 0;
  /// Set when the document could not be evaluated (e.g. degenerate WEAT).
  std::string error;

  bool ok() const { return error.empty(); }
};

struct ScanOptions {
  std::uint32_t window = 8;
  double damping = 0.0;
  unsigned threads = 1;
};

/// Differential bias of removing each document, averaged over the prepared
/// baseline models. Documents touching no WEAT row get exactly 0.
std::vector<DiffBiasRecord> differential_bias_scan(std::span<const EncodedDocument> docs,
                                                   std::span<const WeatInfluence> models,
                                                   const ScanOptions& options);

struct SetApproximation {
  std::vector<double> per_seed;
  double mean = 0.0;
  std::optional<double> std;
  /// More than 5% of the corpus removed; the first-order model is strained.
  bool large_perturbation = false;
};

/// Differential bias of removing a whole set: the documents' deltas are
/// summed into one perturbation and each WEAT word is solved once.
SetApproximation differential_bias_of_set(std::span<const std::uint32_t> doc_ids,
                                          std::span<const EncodedDocument> docs,
                                          std::span<const WeatInfluence> models, const ScanOptions& options);

/// Combined X^(k) rows of `doc_ids`, restricted to the WEAT words.
CoocDelta weat_delta(std::span<const std::uint32_t> doc_ids, std::span<const EncodedDocument> docs,
                     const ResolvedWeat& spec, std::size_t vocab_size, std::uint32_t window);

/// `doc_id,delta_b_mean,delta_b_std,n_seeds,weat_words_touched[,method]`.
void write_scan_csv(std::ostream& out, std::span<const DiffBiasRecord> records, const std::string& method = "");
std::vector<DiffBiasRecord> read_scan_csv(std::istream& in);

/// Histogram of record means as `bin_lo,bin_hi,count` rows.
void write_histogram_csv(std::ostream& out, std::span<const DiffBiasRecord> records, std::size_t bins);

}  // namespace wordbias
