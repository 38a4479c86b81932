#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wordbias/cooc.hpp"
#include "wordbias/glove.hpp"
#include "wordbias/metrics.hpp"

namespace testing {

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

template <typename A, typename B>
double rel_err_vec(const A& a, const B& b) {
  return (a - b).norm() / std::max(a.norm(), b.norm());
}

/// Random symmetric co-occurrence matrix with weights spread across the
/// f(x) < 1 and f(x) = 1 regimes.
inline wordbias::CoocMatrix random_cooc(std::size_t v, double density, std::uint64_t seed, double scale = 150.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<wordbias::CoocEntry> entries;
  for (wordbias::WordId i = 0; i < v; ++i) {
    for (wordbias::WordId j = i; j < v; ++j) {
      if (unit(rng) > density) continue;
      const double w = 0.25 + scale * unit(rng) * unit(rng);
      entries.push_back({i, j, w});
      if (i != j) entries.push_back({j, i, w});
    }
  }
  return wordbias::CoocMatrix::from_entries(v, std::move(entries));
}

inline wordbias::GloveModel random_model(std::size_t v, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.5);
  wordbias::GloveModel m;
  m.hyper.dim = dim;
  m.w = wordbias::Matrix(v, dim);
  wordbias::ContextParams ctx{wordbias::Matrix(v, dim), wordbias::Vector(v), wordbias::Vector(v)};
  for (std::size_t i = 0; i < v; ++i) {
    for (int d = 0; d < dim; ++d) {
      m.w(i, d) = normal(rng);
      ctx.u(i, d) = normal(rng);
    }
    ctx.b[i] = normal(rng);
    ctx.c[i] = normal(rng);
  }
  m.ctx = std::move(ctx);
  return m;
}

/// Ids 0..15 as a WEAT with four words per set.
inline wordbias::ResolvedWeat toy_weat() {
  wordbias::ResolvedWeat r;
  r.name = "toy";
  for (wordbias::WordId k = 0; k < 16; ++k) {
    r.words.push_back(k);
    r.labels.push_back("w" + std::to_string(k));
  }
  r.s = {0, 1, 2, 3};
  r.t = {4, 5, 6, 7};
  r.a = {8, 9, 10, 11};
  r.b = {12, 13, 14, 15};
  return r;
}

}  // namespace testing
