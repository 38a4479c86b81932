#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "wordbias/error.hpp"
#include "wordbias/metrics.hpp"

using namespace wordbias;

namespace {

Matrix random_embedding(std::size_t v, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(v, dim);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = normal(rng);
  }
  return w;
}

// Effect size written out longhand with plain loops.
double naive_effect_size(const Matrix& w, const std::vector<int>& s, const std::vector<int>& t,
                         const std::vector<int>& a, const std::vector<int>& b) {
  const auto cos = [&](int x, int y) {
    double dot = 0, nx = 0, ny = 0;
    for (Eigen::Index d = 0; d < w.cols(); ++d) {
      dot += w(x, d) * w(y, d);
      nx += w(x, d) * w(x, d);
      ny += w(y, d) * w(y, d);
    }
    return dot / std::sqrt(nx * ny);
  };
  const auto assoc = [&](int c) {
    double ma = 0, mb = 0;
    for (int x : a) ma += cos(c, x) / a.size();
    for (int x : b) mb += cos(c, x) / b.size();
    return ma - mb;
  };
  std::vector<double> all;
  double ms = 0, mt = 0;
  for (int x : s) {
    all.push_back(assoc(x));
    ms += all.back() / s.size();
  }
  for (int x : t) {
    all.push_back(assoc(x));
    mt += all.back() / t.size();
  }
  double m = 0;
  for (double v : all) m += v / all.size();
  double ss = 0;
  for (double v : all) ss += (v - m) * (v - m);
  return (ms - mt) / std::sqrt(ss / (all.size() - 1));
}

ResolvedWeat swapped_targets(ResolvedWeat r) {
  std::swap(r.s, r.t);
  return r;
}

ResolvedWeat swapped_attributes(ResolvedWeat r) {
  std::swap(r.a, r.b);
  return r;
}

}  // namespace

TEST_CASE("cosine") {
  Vector a(2), b(2);
  a << 1, 0;
  b << 1, 1;
  CHECK(cosine(a, b) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK_THROWS_AS(cosine(a, Vector::Zero(2)), ZeroNormError);
}

TEST_CASE("effect size matches a longhand computation") {
  const auto spec = testing::toy_weat();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto w = random_embedding(20, 6, seed);
    const double expected = naive_effect_size(w, {0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}, {12, 13, 14, 15});
    CHECK(weat_effect_size(w, spec) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("population standard deviation option") {
  const auto spec = testing::toy_weat();
  const auto w = random_embedding(16, 5, 3);
  const double sample = weat_effect_size(w, spec);
  const double population = weat_effect_size(w, spec, {StdDev::kPopulation});
  CHECK(population == doctest::Approx(sample * std::sqrt(8.0 / 7.0)).epsilon(1e-12));
}

TEST_CASE("antisymmetry under swapping targets or attributes") {
  const auto spec = testing::toy_weat();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = random_embedding(16, 7, 100 + seed);
    const double e = weat_effect_size(w, spec);
    CHECK(std::fabs(weat_effect_size(w, swapped_targets(spec)) + e) <= 1e-12);
    CHECK(std::fabs(weat_effect_size(w, swapped_attributes(spec)) + e) <= 1e-12);
  }
}

TEST_CASE("invariance under rotation and positive rescaling") {
  const auto spec = testing::toy_weat();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = random_embedding(16, 6, 200 + seed);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_embedding(6, 6, 300 + seed));
    const Eigen::MatrixXd q = qr.householderQ();
    const Matrix rotated = w * q;
    Matrix scaled = w;
    for (Eigen::Index r = 0; r < scaled.rows(); ++r) scaled.row(r) *= scale(rng);
    const double e = weat_effect_size(w, spec);
    CHECK(std::fabs(weat_effect_size(rotated, spec) - e) <= 1e-10);
    CHECK(std::fabs(weat_effect_size(scaled, spec) - e) <= 1e-10);
  }
}

TEST_CASE("WEAT gradient matches central differences and is orthogonal to each vector") {
  const auto spec = testing::toy_weat();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto w = random_embedding(18, 5, 400 + seed);
    const auto grad = weat_gradient(w, spec);
    CHECK(grad.size() == 16);
    const double eps = 1e-6;
    for (const auto& [id, g] : grad) {
      Vector fd(w.cols());
      for (Eigen::Index d = 0; d < w.cols(); ++d) {
        const double saved = w(id, d);
        w(id, d) = saved + eps;
        const double up = weat_effect_size(w, spec);
        w(id, d) = saved - eps;
        const double down = weat_effect_size(w, spec);
        w(id, d) = saved;
        fd[d] = (up - down) / (2 * eps);
      }
      CHECK(testing::rel_err_vec(g, fd) <= 1e-5);
      const Vector wi = w.row(id).transpose();
      CHECK(std::fabs(g.dot(wi)) <= 1e-10);
    }
  }
}

TEST_CASE("degenerate WEAT is reported") {
  const auto spec = testing::toy_weat();
  Matrix w = Matrix::Ones(16, 3);
  CHECK_THROWS_AS(weat_effect_size(w, spec), DegenerateWeatError);
}

TEST_CASE("spec parsing, validation and resolution") {
  std::istringstream in(
      "# comment\nname: tiny\nS: x1, x2\nT: y1, y2\n\nA: a1, a2\nB: b1, b2\n");
  const auto spec = parse_weat_spec(in);
  CHECK(spec.name == "tiny");
  CHECK(spec.s == std::vector<std::string>{"x1", "x2"});
  std::ostringstream out;
  write_weat_spec(out, spec);
  std::istringstream again(out.str());
  const auto back = parse_weat_spec(again);
  CHECK(back.b == spec.b);

  std::istringstream uneven("name: u\nS: a, b\nT: c\nA: d\nB: e\n");
  CHECK_THROWS_AS(parse_weat_spec(uneven), Error);
  std::istringstream overlap("name: o\nS: a\nT: a\nA: d\nB: e\n");
  CHECK_THROWS_AS(parse_weat_spec(overlap), Error);

  const Vocabulary vocab({"x1", "y1", "a1", "b1", "x2", "y2", "a2"}, {7, 6, 5, 4, 3, 2, 1});
  CHECK_THROWS_WITH_AS(resolve(spec, vocab), doctest::Contains("b2"), Error);
}

TEST_CASE("shipped WEAT lists load") {
  const auto weat1 = load_weat_spec(std::string(WORDBIAS_DATA_DIR) + "/weat1.txt");
  CHECK(weat1.s.size() == 8);
  CHECK(weat1.s.front() == "science");
  CHECK(weat1.b.back() == "daughter");
  const auto weat2 = load_weat_spec(std::string(WORDBIAS_DATA_DIR) + "/weat2.txt");
  CHECK(weat2.t.size() == 25);
}

TEST_CASE("projection bias") {
  ResolvedWeat spec;
  spec.words = {0, 1, 2, 3};
  spec.labels = {"a", "b", "s", "t"};
  spec.a = {0};
  spec.b = {1};
  spec.s = {2};
  spec.t = {3};
  Matrix w(4, 2);
  w << 1, 0, -1, 0, 2, 0, 0, 3;
  const std::vector<WordId> targets{2, 3};
  const auto p = projection_bias(w, spec, targets);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  Matrix same(4, 2);
  same << 1, 0, 1, 0, 2, 0, 0, 3;
  CHECK_THROWS_AS(projection_bias(same, spec, targets), Error);
}
