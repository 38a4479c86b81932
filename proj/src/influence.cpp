#include "wordbias/influence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "wordbias/error.hpp"
#include "wordbias/parallel.hpp"

namespace wordbias {
namespace {

constexpr int kDampingRetries = 3;

std::optional<double> lookup(const SparseRow& row, WordId j) {
  const auto it = std::lower_bound(row.cols.begin(), row.cols.end(), j);
  if (it == row.cols.end() || *it != j) return std::nullopt;
  return row.weights[static_cast<std::size_t>(it - row.cols.begin())];
}

void summarize(std::vector<double> per_seed, std::vector<double>& out_per_seed, double& mean,
               std::optional<double>& std) {
  double sum = 0.0;
  for (const double v : per_seed) sum += v;
  mean = per_seed.empty() ? 0.0 : sum / static_cast<double>(per_seed.size());
  std.reset();
  if (per_seed.size() > 1) {
    double ss = 0.0;
    for (const double v : per_seed) ss += (v - mean) * (v - mean);
    std = std::sqrt(ss / static_cast<double>(per_seed.size() - 1));
  }
  out_per_seed = std::move(per_seed);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Vector WordSystem::solve(const Vector& rhs) const { return llt_.solve(rhs); }

Eigen::MatrixXd WordSystem::reconstruct() const {
  const Eigen::MatrixXd l = llt_.matrixL();
  return l * l.transpose();
}

WordSystem word_hessian(WordId i, const SparseRow& row, const Matrix& u, const Hyperparams& hyper, double damping) {
  if (damping < 0.0) throw Error("damping must be non-negative");
  const auto dim = u.cols();
  WordSystem sys;
  sys.word_id_ = i;
  sys.hessian_ = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double f = weight_f(row.weights[k], hyper);
    if (f == 0.0) continue;
    const Vector uj = u.row(row.cols[k]).transpose();
    sys.hessian_.selfadjointView<Eigen::Lower>().rankUpdate(uj, 2.0 * f);
  }
  sys.hessian_.triangularView<Eigen::StrictlyUpper>() = sys.hessian_.transpose();

  double lambda = std::max(damping, kRelativeDamping * sys.hessian_.trace() / static_cast<double>(dim));
  if (lambda == 0.0) lambda = kRelativeDamping;
  for (int attempt = 0; attempt <= kDampingRetries; ++attempt, lambda *= 10.0) {
    sys.llt_.compute(sys.hessian_ + lambda * Eigen::MatrixXd::Identity(dim, dim));
    if (sys.llt_.info() == Eigen::Success) {
      sys.lambda_ = lambda;
      return sys;
    }
  }
  throw Error("Hessian of word " + std::to_string(i) + " is not positive definite after damping");
}

Vector pointwise_grad(const SparseRow& row, const Vector& w_i, double b_i, const Matrix& u, const Vector& c,
                      const Hyperparams& hyper) {
  Vector g = Vector::Zero(w_i.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    const WordId j = row.cols[k];
    const double x = row.weights[k];
    const double r = u.row(j).dot(w_i) + b_i + c[j] - std::log(x);
    g += 2.0 * weight_f(x, hyper) * r * u.row(j).transpose();
  }
  return g;
}

OwnedRow perturb_row(const SparseRow& row, std::span<const CoocEntry> delta_row) {
  OwnedRow out;
  std::size_t d = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const WordId j = row.cols[k];
    double x = row.weights[k];
    while (d < delta_row.size() && delta_row[d].j < j) ++d;
    if (d < delta_row.size() && delta_row[d].j == j) x -= delta_row[d].weight;
    if (x > kZeroTolerance) {
      out.cols.push_back(j);
      out.weights.push_back(x);
    }
  }
  return out;
}

Vector gradient_change(const SparseRow& row, std::span<const CoocEntry> delta_row, const Vector& w_i, double b_i,
                       const Matrix& u, const Vector& c, const Hyperparams& hyper) {
  Vector g = Vector::Zero(w_i.size());
  for (const auto& e : delta_row) {
    const double before = lookup(row, e.j).value_or(0.0);
    if (e.weight > before + kZeroTolerance) {
      throw Error("removal exceeds co-occurrence weight at (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                  ")");
    }
    const double after = before - e.weight;
    const double s = u.row(e.j).dot(w_i) + b_i + c[e.j];
    const double term_before = before > 0.0 ? weight_f(before, hyper) * (s - std::log(before)) : 0.0;
    const double term_after = after > kZeroTolerance ? weight_f(after, hyper) * (s - std::log(after)) : 0.0;
    g += 2.0 * (term_after - term_before) * u.row(e.j).transpose();
  }
  return g;
}

Vector approx_perturbed_vector(const WordSystem& system, const Vector& w_star, const Vector& grad_before,
                               const Vector& grad_after) {
  if (grad_after == grad_before) return w_star;
  return w_star - system.solve(grad_after - grad_before);
}

WeatInfluence::WeatInfluence(const CoocMatrix& x, const GloveModel& model, const ResolvedWeat& spec, double damping)
    : x_(&x), model_(&model), spec_(&spec) {
  if (model.vocab_size() != x.vocab_size()) {
    throw Error("model has " + std::to_string(model.vocab_size()) + " words but co-occurrence matrix has " +
                std::to_string(x.vocab_size()));
  }
  const auto& ctx = model.context();
  systems_.reserve(spec.words.size());
  for (const auto id : spec.words) systems_.push_back(word_hessian(id, x.row(id), ctx.u, model.hyper, damping));
  local_ = gather(model.w, spec);
  baseline_ = effect_size(local_, spec);
}

std::map<WordId, Vector> WeatInfluence::perturbed_vectors(const CoocDelta& delta) const {
  const auto& ctx = model_->context();
  std::map<WordId, Vector> out;
  for (const auto id : delta.rows()) {
    const auto pos = spec_->position(id);
    if (!pos) continue;
    const Vector w_star = local_.row(static_cast<Eigen::Index>(*pos)).transpose();
    const Vector change = gradient_change(x_->row(id), delta.row(id), w_star, ctx.b[id], ctx.u, ctx.c, model_->hyper);
    out.emplace(id, approx_perturbed_vector(systems_[*pos], w_star, Vector::Zero(change.size()), change));
  }
  return out;
}

double WeatInfluence::differential_bias(const CoocDelta& delta) const {
  const auto moved = perturbed_vectors(delta);
  if (moved.empty()) return 0.0;
  Matrix perturbed = local_;
  for (const auto& [id, v] : moved) perturbed.row(static_cast<Eigen::Index>(*spec_->position(id))) = v.transpose();
  return baseline_ - effect_size(perturbed, *spec_);
}

CoocDelta weat_delta(std::span<const std::uint32_t> doc_ids, std::span<const EncodedDocument> docs,
                     const ResolvedWeat& spec, std::size_t vocab_size, std::uint32_t window) {
  const auto filter = RowFilter::of(vocab_size, spec.words);
  std::vector<CoocEntry> all;
  for (const auto id : doc_ids) {
    if (id >= docs.size()) {
      throw Error("document id " + std::to_string(id) + " out of range (corpus has " + std::to_string(docs.size()) +
                  " documents)");
    }
    const auto d = doc_cooc_rows(docs[id], window, filter);
    all.insert(all.end(), d.entries.begin(), d.entries.end());
  }
  auto delta = CoocDelta::from_entries(std::move(all));
  delta.docs.assign(doc_ids.begin(), doc_ids.end());
  return delta;
}

std::vector<DiffBiasRecord> differential_bias_scan(std::span<const EncodedDocument> docs,
                                                   std::span<const WeatInfluence> models,
                                                   const ScanOptions& options) {
  if (models.empty()) throw Error("differential bias scan needs at least one model");
  const auto& spec = models.front().spec();
  const std::size_t vocab_size = models.front().model().vocab_size();
  std::vector<DiffBiasRecord> records(docs.size());

  parallel_for(docs.size(), options.threads, [&](std::size_t k) {
    auto& rec = records[k];
    rec.doc_id = static_cast<std::uint32_t>(k);
    const std::uint32_t id = rec.doc_id;
    const auto delta = weat_delta(std::span(&id, 1), docs, spec, vocab_size, options.window);
    for (const auto row : delta.rows()) rec.weat_words_touched += spec.position(row).has_value();

    std::vector<double> per_seed(models.size(), 0.0);
    if (rec.weat_words_touched > 0) {
      try {
        for (std::size_t m = 0; m < models.size(); ++m) per_seed[m] = models[m].differential_bias(delta);
      } catch (const Error& e) {
        rec.error = e.what();
        return;
      }
    }
    summarize(std::move(per_seed), rec.per_seed, rec.delta_b, rec.delta_b_std);
  });
  return records;
}

SetApproximation differential_bias_of_set(std::span<const std::uint32_t> doc_ids,
                                          std::span<const EncodedDocument> docs,
                                          std::span<const WeatInfluence> models, const ScanOptions& options) {
  if (models.empty()) throw Error("set approximation needs at least one model");
  const auto& spec = models.front().spec();
  const auto delta = weat_delta(doc_ids, docs, spec, models.front().model().vocab_size(), options.window);
  std::vector<double> per_seed(models.size(), 0.0);
  if (!delta.empty()) {
    for (std::size_t m = 0; m < models.size(); ++m) per_seed[m] = models[m].differential_bias(delta);
  }
  SetApproximation out;
  summarize(std::move(per_seed), out.per_seed, out.mean, out.std);
  out.large_perturbation = doc_ids.size() * 20 > docs.size();
  return out;
}

void write_scan_csv(std::ostream& out, std::span<const DiffBiasRecord> records, const std::string& method) {
  out << "doc_id,delta_b_mean,delta_b_std,n_seeds,weat_words_touched";
  if (!method.empty()) out << ",method";
  out << '\n';
  for (const auto& r : records) {
    out << r.doc_id << ',';
    if (r.ok()) {
      out << format_double(r.delta_b) << ',' << (r.delta_b_std ? format_double(*r.delta_b_std) : "") << ','
          << r.per_seed.size();
    } else {
      out << ",,0";
    }
    out << ',' << r.weat_words_touched;
    if (!method.empty()) out << ',' << method;
    out << '\n';
  }
}

std::vector<DiffBiasRecord> read_scan_csv(std::istream& in) {
  std::vector<DiffBiasRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("doc_id") || line.starts_with("#")) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() < 5) throw Error("scan CSV line " + std::to_string(line_no) + ": expected 5 fields");
    try {
      DiffBiasRecord r;
      r.doc_id = static_cast<std::uint32_t>(std::stoul(fields[0]));
      const auto n_seeds = std::stoul(fields[3]);
      r.weat_words_touched = std::stoul(fields[4]);
      if (n_seeds == 0) {
        r.error = "not evaluated";
      } else {
        r.delta_b = std::stod(fields[1]);
        if (!fields[2].empty()) r.delta_b_std = std::stod(fields[2]);
        r.per_seed.assign(n_seeds, r.delta_b);
      }
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error("scan CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return records;
}

void write_histogram_csv(std::ostream& out, std::span<const DiffBiasRecord> records, std::size_t bins) {
  if (bins == 0) throw Error("histogram needs at least one bin");
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    lo = first ? r.delta_b : std::min(lo, r.delta_b);
    hi = first ? r.delta_b : std::max(hi, r.delta_b);
    first = false;
  }
  if (hi == lo) hi = lo + 1.0;
  std::vector<std::size_t> counts(bins, 0);
  for (const auto& r : records) {
    if (!r.ok()) continue;
    auto bin = static_cast<std::size_t>((r.delta_b - lo) / (hi - lo) * static_cast<double>(bins));
    ++counts[std::min(bin, bins - 1)];
  }
  out << "bin_lo,bin_hi,count\n";
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out << format_double(lo + width * static_cast<double>(k)) << ',' << format_double(lo + width * static_cast<double>(k + 1))
        << ',' << counts[k] << '\n';
  }
}

}  // namespace wordbias
