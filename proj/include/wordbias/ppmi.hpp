#pragma once

#include <span>
#include <vector>

#include "wordbias/cooc.hpp"
#include "wordbias/influence.hpp"
#include "wordbias/metrics.hpp"

namespace wordbias {

struct PpmiOptions {
  /// Context-distribution smoothing exponent; 1 is plain PPMI.
  double context_alpha = 1.0;
};

/// Positive pointwise mutual information of a co-occurrence matrix, stored
/// sparsely (only positive entries), with the marginals of X.
class PpmiMatrix {
 public:
  std::size_t vocab_size() const { return row_ptr_.size() - 1; }
  SparseRow row(WordId i) const;
  double at(WordId i, WordId j) const;
  const std::vector<double>& row_sums() const { return row_sums_; }
  const std::vector<double>& col_sums() const { return col_sums_; }
  double total() const { return total_; }

  bool operator==(const PpmiMatrix&) const = default;

 private:
  friend PpmiMatrix build_ppmi(const CoocMatrix&, const PpmiOptions&);

  std::vector<std::size_t> row_ptr_{0};
  std::vector<WordId> cols_;
  std::vector<double> values_;
  std::vector<double> row_sums_;
  std::vector<double> col_sums_;
  double total_ = 0.0;
};

/// entry(i, j) = max(0, log(X_ij N / (r_i c_j))) over stored entries; with
/// smoothing, c_j is replaced by N c_j^a / sum_k c_k^a.
PpmiMatrix build_ppmi(const CoocMatrix& x, const PpmiOptions& options = {});

/// Cosine of two sparse rows. Throws ZeroNormError on an empty row.
double sparse_cosine(const SparseRow& a, const SparseRow& b);

/// WEAT effect size with every word represented by its PPMI row.
double ppmi_weat(const PpmiMatrix& p, const ResolvedWeat& spec, const WeatOptions& options = {});

/// Change in PPMI WEAT effect size from removing each document:
/// B_ppmi(X) - B_ppmi(X - X^(k)). WEAT rows are rebuilt with exactly
/// updated marginals; other rows never enter the metric.
std::vector<DiffBiasRecord> ppmi_diff_scan(std::span<const EncodedDocument> docs, const CoocMatrix& x,
                                           const ResolvedWeat& spec, std::uint32_t window,
                                           const PpmiOptions& options = {}, unsigned threads = 1);

}  // namespace wordbias
