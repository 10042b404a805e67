#include "fpplab/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpplab/rng.hpp"

namespace fpplab {

double sample_mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0, c = 0;
  for (double v : x) {
    const double y = v - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0;
  const double m = sample_mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EstimatorSummary summarize(std::span<const double> values, int resamples, std::uint64_t seed) {
  EstimatorSummary s;
  s.count = values.size();
  if (values.empty()) throw std::invalid_argument("summary of an empty sample");
  s.mean = sample_mean(values);
  s.variance = sample_variance(values);
  s.mean_ci = {s.mean, s.mean};
  s.variance_ci = {s.variance, s.variance};
  if (resamples <= 0 || values.size() < 2) return s;
  CounterStream rng(seed);
  std::vector<double> means, vars, buf(values.size());
  means.reserve(static_cast<std::size_t>(resamples));
  vars.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    for (auto& v : buf) v = values[rng.below(values.size())];
    means.push_back(sample_mean(buf));
    vars.push_back(sample_variance(buf));
  }
  std::sort(means.begin(), means.end());
  std::sort(vars.begin(), vars.end());
  s.mean_ci = {quantile_sorted(means, 0.025), quantile_sorted(means, 0.975)};
  s.variance_ci = {quantile_sorted(vars, 0.025), quantile_sorted(vars, 0.975)};
  return s;
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols needs >= 2 paired points");
  const double k = static_cast<double>(x.size());
  const double mx = sample_mean(x), my = sample_mean(y);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("ols needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    rss += r * r;
  }
  if (x.size() > 2) {
    const double s2 = rss / (k - 2);
    f.slope_stderr = std::sqrt(s2 / sxx);
    f.intercept_stderr = std::sqrt(s2 * (1.0 / k + mx * mx / sxx));
  }
  return f;
}

FitResult fit_chi(const std::vector<std::pair<double, double>>& n_var) {
  if (n_var.size() < 3) throw std::invalid_argument("fit_chi needs at least three (n, Var) pairs");
  std::vector<double> x, y;
  for (const auto& [n, v] : n_var) {
    if (!(v > 0)) throw std::invalid_argument("fit_chi needs positive variances");
    if (!(n > 0)) throw std::invalid_argument("fit_chi needs positive n");
    x.push_back(std::log(n));
    y.push_back(std::log(v));
  }
  const auto f = ols(x, y);
  FitResult r;
  r.points = static_cast<int>(n_var.size());
  r.chi_hat = f.slope / 2;
  r.chi_stderr = f.slope_stderr / 2;
  r.sigma_hat = std::exp(f.intercept);
  r.nu_hat = std::numeric_limits<double>::quiet_NaN();
  r.residuals = f.residuals;
  return r;
}

double chi_square_sf(double stat, double dof) {
  if (stat <= 0) return 1;
  return boost::math::gamma_q(dof / 2, stat / 2);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1;
  if (lambda < 0.2) return 1;
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2 : -2) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_sf(lambda)};
}

}  // namespace fpplab
