#include "wordbias/ppmi.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wordbias/error.hpp"
#include "wordbias/parallel.hpp"

namespace wordbias {
namespace {

struct Pmi {
  double alpha;
  double total;      // N
  double alpha_sum;  // sum_k c_k^alpha, used when alpha != 1

  double operator()(double x, double r_i, double c_j) const {
    if (alpha == 1.0) return std::log(x * total / (r_i * c_j));
    return std::log(x * alpha_sum / (r_i * std::pow(c_j, alpha)));
  }
};

double alpha_sum(const std::vector<double>& col_sums, double alpha) {
  double sum = 0.0;
  for (const double c : col_sums) {
    if (c > 0.0) sum += std::pow(c, alpha);
  }
  return sum;
}

double norm(const SparseRow& r) {
  double ss = 0.0;
  for (const double v : r.weights) ss += v * v;
  return std::sqrt(ss);
}

double sparse_dot(const SparseRow& a, const SparseRow& b) {
  double dot = 0.0;
  std::size_t p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a.cols[p] < b.cols[q]) {
      ++p;
    } else if (b.cols[q] < a.cols[p]) {
      ++q;
    } else {
      dot += a.weights[p++] * b.weights[q++];
    }
  }
  return dot;
}

// Effect size over PPMI rows given per WEAT position.
double rows_effect_size(const std::vector<SparseRow>& rows, const ResolvedWeat& spec, const WeatOptions& options) {
  std::vector<double> norms(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    norms[k] = norm(rows[k]);
  }
  return effect_size_from(
      spec,
      [&](std::size_t x, std::size_t y) {
        for (const auto k : {x, y}) {
          if (norms[k] == 0.0) throw ZeroNormError("zero-norm PPMI row for word '" + spec.labels[k] + "'");
        }
        return sparse_dot(rows[x], rows[y]) / (norms[x] * norms[y]);
      },
      options);
}

}  // namespace

SparseRow PpmiMatrix::row(WordId i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {std::span(cols_).subspan(begin, len), std::span(values_).subspan(begin, len)};
}

double PpmiMatrix::at(WordId i, WordId j) const {
  const auto r = row(i);
  const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
  if (it == r.cols.end() || *it != j) return 0.0;
  return r.weights[static_cast<std::size_t>(it - r.cols.begin())];
}

PpmiMatrix build_ppmi(const CoocMatrix& x, const PpmiOptions& options) {
  if (x.empty()) throw Error("cannot build PPMI from an empty co-occurrence matrix");
  if (!(options.context_alpha > 0.0)) throw Error("PPMI context exponent must be positive");
  const std::size_t vocab_size = x.vocab_size();
  PpmiMatrix p;
  p.row_sums_.resize(vocab_size);
  p.col_sums_.assign(vocab_size, 0.0);
  for (WordId i = 0; i < vocab_size; ++i) {
    p.row_sums_[i] = x.row_sum(i);
    // X is symmetric, so column sums equal row sums.
    p.col_sums_[i] = p.row_sums_[i];
  }
  p.total_ = x.total_weight();
  const Pmi pmi{options.context_alpha, p.total_, alpha_sum(p.col_sums_, options.context_alpha)};

  p.row_ptr_.assign(vocab_size + 1, 0);
  for (WordId i = 0; i < vocab_size; ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double v = pmi(r.weights[k], p.row_sums_[i], p.col_sums_[r.cols[k]]);
      if (v > 0.0) {
        p.cols_.push_back(r.cols[k]);
        p.values_.push_back(v);
      }
    }
    p.row_ptr_[i + 1] = p.cols_.size();
  }
  return p;
}

double sparse_cosine(const SparseRow& a, const SparseRow& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroNormError("cosine of an all-zero sparse row");
  return sparse_dot(a, b) / (na * nb);
}

double ppmi_weat(const PpmiMatrix& p, const ResolvedWeat& spec, const WeatOptions& options) {
  std::vector<SparseRow> rows;
  rows.reserve(spec.words.size());
  for (const auto id : spec.words) rows.push_back(p.row(id));
  return rows_effect_size(rows, spec, options);
}

std::vector<DiffBiasRecord> ppmi_diff_scan(std::span<const EncodedDocument> docs, const CoocMatrix& x,
                                           const ResolvedWeat& spec, std::uint32_t window,
                                           const PpmiOptions& options, unsigned threads) {
  if (x.empty()) throw Error("cannot scan an empty co-occurrence matrix");
  const std::size_t vocab_size = x.vocab_size();
  std::vector<double> sums(vocab_size);
  for (WordId i = 0; i < vocab_size; ++i) sums[i] = x.row_sum(i);
  const double total = x.total_weight();
  const double base_alpha_sum = alpha_sum(sums, options.context_alpha);
  const auto all_rows = RowFilter::all(vocab_size);

  // B_ppmi of X - delta; the empty delta gives the baseline through the same arithmetic.
  const auto perturbed_bias = [&](const CoocDelta& delta, std::size_t* touched) {
    std::unordered_map<WordId, double> drop;
    double total_drop = 0.0;
    for (const auto& e : delta.entries) {
      drop[e.i] += e.weight;
      total_drop += e.weight;
    }
    const auto marginal = [&](WordId j) {
      const auto it = drop.find(j);
      return it == drop.end() ? sums[j] : sums[j] - it->second;
    };
    double new_alpha_sum = base_alpha_sum;
    if (options.context_alpha != 1.0) {
      for (const auto& [j, d] : drop) {
        const double before = sums[j] > 0.0 ? std::pow(sums[j], options.context_alpha) : 0.0;
        const double after_sum = sums[j] - d;
        const double after = after_sum > kZeroTolerance ? std::pow(after_sum, options.context_alpha) : 0.0;
        new_alpha_sum += after - before;
      }
    }
    const Pmi pmi{options.context_alpha, total - total_drop, new_alpha_sum};

    std::vector<OwnedRow> owned(spec.words.size());
    if (touched) *touched = 0;
    for (std::size_t k = 0; k < spec.words.size(); ++k) {
      const WordId i = spec.words[k];
      const auto delta_row = delta.row(i);
      if (touched && !delta_row.empty()) ++*touched;
      const OwnedRow counts = perturb_row(x.row(i), delta_row);
      const double r_i = marginal(i);
      for (std::size_t n = 0; n < counts.cols.size(); ++n) {
        const double v = pmi(counts.weights[n], r_i, marginal(counts.cols[n]));
        if (v > 0.0) {
          owned[k].cols.push_back(counts.cols[n]);
          owned[k].weights.push_back(v);
        }
      }
    }
    std::vector<SparseRow> rows;
    rows.reserve(owned.size());
    for (const auto& r : owned) rows.push_back(r.view());
    return rows_effect_size(rows, spec, {});
  };

  const double baseline = perturbed_bias(CoocDelta{}, nullptr);
  std::vector<DiffBiasRecord> records(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t k) {
    auto& rec = records[k];
    rec.doc_id = static_cast<std::uint32_t>(k);
    const auto delta = doc_cooc_rows(docs[k], window, all_rows);
    try {
      const double delta_b = delta.empty() ? 0.0 : baseline - perturbed_bias(delta, &rec.weat_words_touched);
      rec.per_seed = {delta_b};
      rec.delta_b = delta_b;
    } catch (const Error& e) {
      rec.error = e.what();
    }
  });
  return records;
}

}  // namespace wordbias
