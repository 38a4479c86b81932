#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wordbias/error.hpp"
#include "wordbias/stats.hpp"

using namespace wordbias;
using Samples = std::vector<double>;

TEST_CASE("mean and sample standard deviation") {
  const Samples xs{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(xs) == 5.0);
  CHECK(*sample_std(xs) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK_FALSE(sample_std(Samples{1.0}).has_value());
  CHECK_THROWS_AS(mean(Samples{}), Error);
}

TEST_CASE("Welch's t-test against reference values") {
  // Reference values from an independent statistics package.
  const auto r1 = welch_t(Samples{1.2, 2.4, 1.9, 3.1, 2.2}, Samples{2.8, 3.9, 3.3, 4.6});
  CHECK(r1.t == doctest::Approx(-2.995416139691763).epsilon(1e-10));
  CHECK(r1.p == doctest::Approx(0.023326344674502394).epsilon(1e-8));
  const auto r2 = welch_t(Samples{0.91, 1.02, 0.97}, Samples{1.10, 1.21, 1.05, 1.16, 1.12});
  CHECK(r2.t == doctest::Approx(-3.8620026290299725).epsilon(1e-10));
  CHECK(r2.p == doctest::Approx(0.013264805814225476).epsilon(1e-8));
}

TEST_CASE("Welch's t-test trivial cases") {
  const Samples a{1, 2, 3};
  const auto same = welch_t(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK(welch_t(a, Samples{101, 102, 103}).p < 0.01);
  CHECK_THROWS_AS(welch_t(Samples{1}, a), Error);
  CHECK_THROWS_AS(welch_t(Samples{1, 1}, Samples{2, 2}), Error);
}

TEST_CASE("Welch's t-test is antisymmetric in its arguments") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Samples a(2 + trial % 5), b(3 + trial % 4);
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng) + 0.5;
    const auto ab = welch_t(a, b), ba = welch_t(b, a);
    CHECK(ab.t == doctest::Approx(-ba.t));
    CHECK(ab.p == doctest::Approx(ba.p));
    CHECK(ab.p > 0.0);
    CHECK(ab.p <= 1.0);
  }
}

TEST_CASE("r squared") {
  CHECK(r_squared(Samples{1, 2, 3, 4}, Samples{3, 5, 7, 9}) == doctest::Approx(1.0));
  CHECK(r_squared(Samples{1, 2, 3, 4, 5.5}, Samples{2.1, 3.9, 6.2, 7.8, 11.5}) ==
        doctest::Approx(0.9955672380004357).epsilon(1e-12));
  CHECK_THROWS_AS(r_squared(Samples{1, 1, 1}, Samples{1, 2, 3}), Error);
  CHECK_THROWS_AS(r_squared(Samples{1, 2}, Samples{1, 2, 3}), Error);
  CHECK_THROWS_AS(r_squared(Samples{1}, Samples{1}), Error);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  Samples x(5000), y(5000);
  for (auto& v : x) v = normal(rng);
  for (auto& v : y) v = normal(rng);
  CHECK(r_squared(x, y) < 0.01);
}
