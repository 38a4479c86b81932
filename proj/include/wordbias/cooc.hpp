#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "wordbias/corpus.hpp"

namespace wordbias {

/// Weights below this are structural zeros after a subtraction.
inline constexpr double kZeroTolerance = 1e-9;

/// Harmonic context weight 1/d, rounded to a 2^-24 grid. All sums of grid
/// values below 2^29 are exact in double precision, which makes
/// co-occurrence accumulation independent of summation order.
double harmonic_weight(std::uint32_t distance);

struct CoocEntry {
  WordId i;
  WordId j;
  double weight;
  bool operator==(const CoocEntry&) const = default;
};

/// Read-only view of one sparse row: parallel column-id and weight arrays.
struct SparseRow {
  std::span<const WordId> cols;
  std::span<const double> weights;
  std::size_t size() const { return cols.size(); }
  bool empty() const { return cols.empty(); }
};

/// Sparse symmetric V x V co-occurrence matrix in compressed-row form.
/// Both (i, j) and (j, i) are stored; no explicit zeros.
class CoocMatrix {
 public:
  CoocMatrix() = default;
  explicit CoocMatrix(std::size_t vocab_size);

  /// Sums duplicate coordinates. Throws on out-of-range ids, negative or
  /// non-finite weights, or an asymmetric result. Zero weights are dropped.
  static CoocMatrix from_entries(std::size_t vocab_size, std::vector<CoocEntry> entries);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t nnz() const { return cols_.size(); }
  bool empty() const { return cols_.empty(); }
  double total_weight() const { return total_weight_; }

  SparseRow row(WordId i) const;
  double row_sum(WordId i) const;
  /// 0 when the entry is not stored.
  double at(WordId i, WordId j) const;
  std::vector<CoocEntry> entries() const;

  bool operator==(const CoocMatrix&) const = default;

 private:
  std::size_t vocab_size_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<WordId> cols_;
  std::vector<double> weights_;
  double total_weight_ = 0.0;
};

/// A sparse co-occurrence perturbation: X^(k) for a document, a set of
/// documents, or a synthetic delta. Entries sorted by (i, j), unique.
struct CoocDelta {
  std::vector<CoocEntry> entries;
  /// Source documents; empty for synthetic deltas.
  std::vector<std::uint32_t> docs;

  static CoocDelta from_entries(std::vector<CoocEntry> entries);

  bool empty() const { return entries.empty(); }
  double total_weight() const;
  /// Entries of row i.
  std::span<const CoocEntry> row(WordId i) const;
  /// Sorted list of row ids with at least one entry.
  std::vector<WordId> rows() const;
  CoocDelta scaled(double factor) const;
};

/// Entrywise sum; provenance lists are concatenated.
CoocDelta merge(const CoocDelta& a, const CoocDelta& b);

/// Constant-time membership test over word ids.
class RowFilter {
 public:
  static RowFilter all(std::size_t vocab_size);
  static RowFilter of(std::size_t vocab_size, std::span<const WordId> ids);

  bool contains(std::int32_t id) const { return all_ || (id >= 0 && mask_[static_cast<std::size_t>(id)]); }

 private:
  bool all_ = false;
  std::vector<char> mask_;
};

/// Symmetric-window co-occurrence counts with harmonic weighting. Pairs never
/// cross document boundaries; OOV tokens occupy positions.
CoocMatrix extract_cooc(std::span<const EncodedDocument> docs, std::size_t vocab_size,
                        std::uint32_t window);
CoocMatrix extract_cooc(const Corpus& corpus, const Vocabulary& vocab, std::uint32_t window);

/// X^(k) restricted to entries whose row or column is in `rows` (so the result
/// stays symmetric).
CoocDelta doc_cooc_rows(const EncodedDocument& doc, std::uint32_t window, const RowFilter& rows);

/// X - delta. Entries that fall to <= kZeroTolerance are deleted. Throws
/// naming (i, j) if the delta exceeds a base weight beyond the tolerance.
CoocMatrix apply_removal(const CoocMatrix& x, const CoocDelta& delta);

/// X + delta.
CoocMatrix apply_addition(const CoocMatrix& x, const CoocDelta& delta);

// Binary format: 16-byte header ("COOC", version, V, record count as
// little-endian u32) followed by (i: u32, j: u32, weight: f64) records sorted
// by (i, j).
inline constexpr std::uint32_t kCoocFormatVersion = 1;
void write_cooc(std::ostream& out, const CoocMatrix& x);
CoocMatrix read_cooc(std::istream& in);
void save_cooc(const std::filesystem::path& path, const CoocMatrix& x);
CoocMatrix load_cooc(const std::filesystem::path& path);

}  // namespace wordbias
