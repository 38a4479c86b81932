#include "wordbias/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "wordbias/error.hpp"

namespace wordbias {
namespace {

constexpr double kDegenerateStd = 1e-12;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_words(const std::string& list) {
  std::vector<std::string> out;
  std::string word;
  for (const char ch : list + ",") {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!word.empty()) out.push_back(std::move(word));
      word.clear();
    } else {
      word.push_back(ch);
    }
  }
  return out;
}

bool disjoint(const std::vector<std::string>& x, const std::vector<std::string>& y) {
  const std::set<std::string> xs(x.begin(), x.end());
  return std::none_of(y.begin(), y.end(), [&](const auto& w) { return xs.contains(w); });
}

// d cos(x, y) / dx
Vector cosine_grad(const Vector& x, const Vector& y) {
  const double nx = x.norm();
  const double ny = y.norm();
  const double cos = x.dot(y) / (nx * ny);
  return y / (nx * ny) - cos * x / (nx * nx);
}

struct Associations {
  std::vector<double> g;  // S then T
  double mean_s = 0.0;
  double mean_t = 0.0;
  double mean_all = 0.0;
  double std = 0.0;
  double denom_n = 0.0;   // n - 1 or n
};

Associations associations(const ResolvedWeat& spec, const std::function<double(std::size_t, std::size_t)>& sim,
                          const WeatOptions& options) {
  Associations out;
  const auto assoc = [&](std::size_t c) {
    double sa = 0.0, sb = 0.0;
    for (const auto a : spec.a) sa += sim(c, a);
    for (const auto b : spec.b) sb += sim(c, b);
    return sa / static_cast<double>(spec.a.size()) - sb / static_cast<double>(spec.b.size());
  };
  for (const auto c : spec.s) out.g.push_back(assoc(c));
  for (const auto c : spec.t) out.g.push_back(assoc(c));
  const std::size_t ns = spec.s.size();
  const std::size_t n = out.g.size();
  double sum_s = 0.0, sum_t = 0.0;
  for (std::size_t k = 0; k < n; ++k) (k < ns ? sum_s : sum_t) += out.g[k];
  out.mean_s = sum_s / static_cast<double>(ns);
  out.mean_t = sum_t / static_cast<double>(n - ns);
  out.mean_all = (sum_s + sum_t) / static_cast<double>(n);
  double ss = 0.0;
  for (const double g : out.g) ss += (g - out.mean_all) * (g - out.mean_all);
  out.denom_n = options.std_dev == StdDev::kSample ? static_cast<double>(n - 1) : static_cast<double>(n);
  out.std = std::sqrt(ss / out.denom_n);
  if (!(out.std > kDegenerateStd)) {
    throw DegenerateWeatError("degenerate WEAT: all target associations equal");
  }
  return out;
}

double checked_cosine(const Matrix& local, const ResolvedWeat& spec, std::size_t x, std::size_t y) {
  const double nx = local.row(static_cast<Eigen::Index>(x)).norm();
  const double ny = local.row(static_cast<Eigen::Index>(y)).norm();
  if (nx == 0.0) throw ZeroNormError("zero-norm vector for word '" + spec.labels[x] + "'");
  if (ny == 0.0) throw ZeroNormError("zero-norm vector for word '" + spec.labels[y] + "'");
  return local.row(static_cast<Eigen::Index>(x)).dot(local.row(static_cast<Eigen::Index>(y))) / (nx * ny);
}

}  // namespace

void WeatSpec::validate() const {
  if (s.size() != t.size() || s.size() < 2) {
    throw Error("WEAT " + name + ": target sets must be equal-sized with at least 2 words");
  }
  if (a.size() != b.size() || a.empty()) {
    throw Error("WEAT " + name + ": attribute sets must be equal-sized and non-empty");
  }
  if (!disjoint(s, t)) throw Error("WEAT " + name + ": target sets overlap");
  if (!disjoint(a, b)) throw Error("WEAT " + name + ": attribute sets overlap");
  for (const auto* set : {&s, &t, &a, &b}) {
    if (std::set<std::string>(set->begin(), set->end()).size() != set->size()) {
      throw Error("WEAT " + name + ": duplicate word within a set");
    }
  }
}

WeatSpec parse_weat_spec(std::istream& in) {
  WeatSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error("WEAT spec line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "name") {
      spec.name = value;
    } else if (key == "S") {
      spec.s = split_words(value);
    } else if (key == "T") {
      spec.t = split_words(value);
    } else if (key == "A") {
      spec.a = split_words(value);
    } else if (key == "B") {
      spec.b = split_words(value);
    } else {
      throw Error("WEAT spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

WeatSpec load_weat_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read WEAT spec: " + path.string());
  return parse_weat_spec(in);
}

void write_weat_spec(std::ostream& out, const WeatSpec& spec) {
  const auto list = [&out](const char* key, const std::vector<std::string>& words) {
    out << key << ':';
    for (std::size_t k = 0; k < words.size(); ++k) out << (k ? ", " : " ") << words[k];
    out << '\n';
  };
  out << "name: " << spec.name << '\n';
  list("S", spec.s);
  list("T", spec.t);
  list("A", spec.a);
  list("B", spec.b);
}

std::optional<std::size_t> ResolvedWeat::position(WordId id) const {
  const auto it = std::lower_bound(words.begin(), words.end(), id);
  if (it == words.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - words.begin());
}

std::vector<std::size_t> ResolvedWeat::targets() const {
  std::vector<std::size_t> out = s;
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

ResolvedWeat resolve(const WeatSpec& spec, const Vocabulary& vocab) {
  spec.validate();
  std::vector<std::string> missing;
  std::set<WordId> ids;
  for (const auto* set : {&spec.s, &spec.t, &spec.a, &spec.b}) {
    for (const auto& word : *set) {
      const auto id = vocab.find(word);
      if (id == kOutOfVocabulary) {
        missing.push_back(word);
      } else {
        ids.insert(static_cast<WordId>(id));
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "WEAT " + spec.name + ": words not in vocabulary:";
    for (const auto& w : missing) msg += " " + w;
    throw Error(msg);
  }
  ResolvedWeat out;
  out.name = spec.name;
  out.words.assign(ids.begin(), ids.end());
  for (const auto id : out.words) out.labels.push_back(vocab.word(id));
  const auto positions = [&](const std::vector<std::string>& words) {
    std::vector<std::size_t> p;
    for (const auto& w : words) p.push_back(*out.position(static_cast<WordId>(vocab.find(w))));
    return p;
  };
  out.s = positions(spec.s);
  out.t = positions(spec.t);
  out.a = positions(spec.a);
  out.b = positions(spec.b);
  return out;
}

Matrix gather(const Matrix& w, const ResolvedWeat& spec) {
  Matrix local(static_cast<Eigen::Index>(spec.words.size()), w.cols());
  for (std::size_t k = 0; k < spec.words.size(); ++k) {
    if (spec.words[k] >= w.rows()) throw Error("WEAT word id outside the embedding");
    local.row(static_cast<Eigen::Index>(k)) = w.row(spec.words[k]);
  }
  return local;
}

double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw ZeroNormError("cosine of a zero-norm vector");
  return a.dot(b) / (na * nb);
}

double weat_assoc(const Vector& wc, const Matrix& local, const ResolvedWeat& spec) {
  double sa = 0.0, sb = 0.0;
  for (const auto a : spec.a) sa += cosine(wc, local.row(static_cast<Eigen::Index>(a)).transpose());
  for (const auto b : spec.b) sb += cosine(wc, local.row(static_cast<Eigen::Index>(b)).transpose());
  return sa / static_cast<double>(spec.a.size()) - sb / static_cast<double>(spec.b.size());
}

double effect_size_from(const ResolvedWeat& spec, const std::function<double(std::size_t, std::size_t)>& sim,
                        const WeatOptions& options) {
  const auto as = associations(spec, sim, options);
  return (as.mean_s - as.mean_t) / as.std;
}

double effect_size(const Matrix& local, const ResolvedWeat& spec, const WeatOptions& options) {
  return effect_size_from(
      spec, [&](std::size_t x, std::size_t y) { return checked_cosine(local, spec, x, y); }, options);
}

double weat_effect_size(const Matrix& w, const ResolvedWeat& spec, const WeatOptions& options) {
  return effect_size(gather(w, spec), spec, options);
}

Matrix effect_size_gradient(const Matrix& local, const ResolvedWeat& spec, const WeatOptions& options) {
  const auto as = associations(
      spec, [&](std::size_t x, std::size_t y) { return checked_cosine(local, spec, x, y); }, options);
  const double numer = as.mean_s - as.mean_t;
  const double sd = as.std;
  const std::size_t ns = spec.s.size();
  const auto targets = spec.targets();

  Matrix grad = Matrix::Zero(local.rows(), local.cols());
  const auto row = [&](std::size_t k) -> Vector { return local.row(static_cast<Eigen::Index>(k)).transpose(); };
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double dnum = k < ns ? 1.0 / static_cast<double>(ns) : -1.0 / static_cast<double>(targets.size() - ns);
    const double dsd = (as.g[k] - as.mean_all) / (as.denom_n * sd);
    const double dB_dg = dnum / sd - numer / (sd * sd) * dsd;

    const std::size_t c = targets[k];
    const Vector wc = row(c);
    const auto accumulate = [&](const std::vector<std::size_t>& attrs, double sign) {
      const double weight = sign * dB_dg / static_cast<double>(attrs.size());
      for (const auto x : attrs) {
        const Vector wx = row(x);
        grad.row(static_cast<Eigen::Index>(c)) += weight * cosine_grad(wc, wx).transpose();
        grad.row(static_cast<Eigen::Index>(x)) += weight * cosine_grad(wx, wc).transpose();
      }
    };
    accumulate(spec.a, 1.0);
    accumulate(spec.b, -1.0);
  }
  return grad;
}

std::map<WordId, Vector> weat_gradient(const Matrix& w, const ResolvedWeat& spec, const WeatOptions& options) {
  const Matrix grad = effect_size_gradient(gather(w, spec), spec, options);
  std::map<WordId, Vector> out;
  for (std::size_t k = 0; k < spec.words.size(); ++k) {
    out.emplace(spec.words[k], grad.row(static_cast<Eigen::Index>(k)).transpose());
  }
  return out;
}

std::vector<double> projection_bias(const Matrix& w, const ResolvedWeat& spec, std::span<const WordId> targets) {
  const Matrix local = gather(w, spec);
  const auto mean_direction = [&](const std::vector<std::size_t>& set) {
    Vector m = Vector::Zero(local.cols());
    for (const auto k : set) {
      const Vector v = local.row(static_cast<Eigen::Index>(k)).transpose();
      const double n = v.norm();
      if (n == 0.0) throw ZeroNormError("zero-norm vector for word '" + spec.labels[k] + "'");
      m += v / n;
    }
    return Vector(m / static_cast<double>(set.size()));
  };
  Vector axis = mean_direction(spec.a) - mean_direction(spec.b);
  const double norm = axis.norm();
  if (!(norm > kDegenerateStd)) throw Error("attribute sets indistinguishable: zero-norm projection axis");
  axis /= norm;
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto id : targets) {
    if (id >= w.rows()) throw Error("target word id outside the embedding");
    const Vector v = w.row(id).transpose();
    if (v.norm() == 0.0) throw ZeroNormError("zero-norm vector for target id " + std::to_string(id));
    out.push_back(v.dot(axis) / v.norm());
  }
  return out;
}

}  // namespace wordbias
