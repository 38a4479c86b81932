#include "wordbias/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "wordbias/error.hpp"

namespace wordbias {
namespace {

double sum_sq_dev(std::span<const double> xs, double m) {
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return ss;
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::optional<double> sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  return std::sqrt(sum_sq_dev(xs, mean(xs)) / static_cast<double>(xs.size() - 1));
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error("Welch's t-test needs at least two samples per group");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sum_sq_dev(a, ma) / (na - 1.0) / na;
  const double vb = sum_sq_dev(b, mb) / (nb - 1.0) / nb;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) throw Error("Welch's t-test on samples with zero variance");
  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  if (r.p > 1.0) r.p = 1.0;
  return r;
}

double r_squared(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("r^2 needs paired samples of equal size");
  if (x.size() < 2) throw Error("r^2 needs at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw Error("r^2 undefined for a constant x");
  if (syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace wordbias
