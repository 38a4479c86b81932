#pragma once

#include <optional>
#include <span>

namespace wordbias {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1); absent for fewer than two samples.
std::optional<double> sample_std(std::span<const double> xs);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  /// Two-sided.
  double p = 1.0;
};

/// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
/// Both samples need at least two values and one of them nonzero variance.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

/// Squared Pearson correlation. Throws on mismatched sizes, fewer than two
/// points or a constant x.
double r_squared(std::span<const double> x, std::span<const double> y);

}  // namespace wordbias
