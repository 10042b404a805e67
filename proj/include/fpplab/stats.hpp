#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fpplab {

struct Interval {
  double lo = 0;
  double hi = 0;

  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Sample mean and unbiased variance with percentile-bootstrap 95% intervals.
struct EstimatorSummary {
  std::size_t count = 0;
  double mean = 0;
  double variance = 0;
  Interval mean_ci;
  Interval variance_ci;
};

double sample_mean(std::span<const double> x);
/// Unbiased (n - 1) variance; 0 for fewer than two values.
double sample_variance(std::span<const double> x);

/// Type-7 quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

inline constexpr int kDefaultBootstrap = 2000;

/// Resample indices come from CounterStream(seed), so the result is a pure
/// function of (values, resamples, seed).
EstimatorSummary summarize(std::span<const double> values, int resamples = kDefaultBootstrap, std::uint64_t seed = 0);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double intercept_stderr = 0;
  std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope x; needs >= 3 points for stderrs.
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// Var(T_n) ~ sigma n^(2 chi).
struct FitResult {
  int points = 0;
  double chi_hat = 0;
  double chi_stderr = 0;
  /// Time constant, when mean passage times were supplied (NaN otherwise).
  double nu_hat = 0;
  double sigma_hat = 0;
  std::vector<double> residuals;
};

/// Log-log least squares of Var against n. Throws std::invalid_argument on
/// fewer than three pairs or a nonpositive variance.
FitResult fit_chi(const std::vector<std::pair<double, double>>& n_var);

/// P(chi^2_dof >= stat).
double chi_square_sf(double stat, double dof);

/// P(sup |B| >= lambda) for the Brownian bridge.
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace fpplab
