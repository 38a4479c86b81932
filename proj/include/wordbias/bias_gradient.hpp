#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "wordbias/cooc.hpp"
#include "wordbias/influence.hpp"

namespace wordbias {

/// dB/dX_ij for the rows of the WEAT words, defined only at stored X_ij > 0.
struct BiasGradient {
  /// Row i -> (j, dB/dX_ij) sorted by j.
  std::map<WordId, std::vector<std::pair<WordId, double>>> rows;
  /// checksum() of the model the gradient was derived from.
  std::uint64_t model_ref = 0;

  /// Gradient entry, or 0 when (i, j) is outside the stored support.
  double at(WordId i, WordId j) const;
};

/// Chains the WEAT gradient through the per-word influence approximation:
///   dB/dX_ij = -2 [f'(X_ij) r_ij - f(X_ij) / X_ij] (grad_{w_i} B)^T H_i^{-1} u_j
BiasGradient bias_gradient(const WeatInfluence& influence);

/// First-order prediction of B(w(X)) - B(w(X - delta)). Entries outside WEAT
/// rows contribute nothing; entries at zero co-occurrences in WEAT rows throw.
double taylor_delta(const BiasGradient& grad, const CoocDelta& delta);

/// `i,j,dB_dXij` sorted by |value| descending.
void write_gradient_csv(std::ostream& out, const BiasGradient& grad);

}  // namespace wordbias
