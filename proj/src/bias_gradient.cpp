#include "wordbias/bias_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "wordbias/error.hpp"

namespace wordbias {

double BiasGradient::at(WordId i, WordId j) const {
  const auto it = rows.find(i);
  if (it == rows.end()) return 0.0;
  const auto& row = it->second;
  const auto pos = std::lower_bound(row.begin(), row.end(), j, [](const auto& e, WordId id) { return e.first < id; });
  return pos != row.end() && pos->first == j ? pos->second : 0.0;
}

BiasGradient bias_gradient(const WeatInfluence& influence) {
  const auto& spec = influence.spec();
  const auto& model = influence.model();
  const auto& ctx = model.context();
  const auto& x = influence.cooc();
  const Matrix grad_b = effect_size_gradient(influence.local(), spec);

  BiasGradient out;
  out.model_ref = checksum(model);
  for (std::size_t k = 0; k < spec.words.size(); ++k) {
    const WordId i = spec.words[k];
    const Vector w_i = influence.local().row(static_cast<Eigen::Index>(k)).transpose();
    // (grad_{w_i} B)^T H^{-1}, as a column since H is symmetric.
    const Vector v = influence.system(k).solve(grad_b.row(static_cast<Eigen::Index>(k)).transpose());
    const Vector projected = ctx.u * v;

    const auto row = x.row(i);
    auto& entries = out.rows[i];
    entries.reserve(row.size());
    for (std::size_t n = 0; n < row.size(); ++n) {
      const WordId j = row.cols[n];
      const double xij = row.weights[n];
      const double r = w_i.dot(ctx.u.row(j)) + ctx.b[i] + ctx.c[j] - std::log(xij);
      const double dgrad = 2.0 * (weight_f_derivative(xij, model.hyper) * r - weight_f(xij, model.hyper) / xij);
      entries.emplace_back(j, -dgrad * projected[j]);
    }
  }
  return out;
}

double taylor_delta(const BiasGradient& grad, const CoocDelta& delta) {
  double total = 0.0;
  for (const auto& e : delta.entries) {
    const auto it = grad.rows.find(e.i);
    if (it == grad.rows.end()) continue;
    const auto& row = it->second;
    const auto pos =
        std::lower_bound(row.begin(), row.end(), e.j, [](const auto& entry, WordId id) { return entry.first < id; });
    if (pos == row.end() || pos->first != e.j) {
      throw Error("bias gradient is undefined at zero co-occurrence (" + std::to_string(e.i) + ", " +
                  std::to_string(e.j) + "): not differentiable there");
    }
    total += pos->second * e.weight;
  }
  return total;
}

void write_gradient_csv(std::ostream& out, const BiasGradient& grad) {
  struct Item {
    WordId i, j;
    double value;
  };
  std::vector<Item> items;
  for (const auto& [i, row] : grad.rows) {
    for (const auto& [j, value] : row) items.push_back({i, j, value});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return std::abs(a.value) > std::abs(b.value); });
  out << "i,j,dB_dXij\n";
  char buf[32];
  for (const auto& it : items) {
    std::snprintf(buf, sizeof buf, "%.17g", it.value);
    out << it.i << ',' << it.j << ',' << buf << '\n';
  }
}

}  // namespace wordbias
