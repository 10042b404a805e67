#include "fpplab/lpp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "fpplab/rng.hpp"

namespace fpplab {

LppGrid LppGrid::from_weights(int n, std::vector<double> weights) {
  if (n < 0) throw std::invalid_argument("negative LPP side");
  const auto side = static_cast<std::size_t>(n) + 1;
  if (weights.size() != side * side) throw std::invalid_argument("LPP grid needs (n+1)^2 weights");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("LPP weights must be finite and nonnegative");
  LppGrid g;
  g.n = n;
  g.weights = std::move(weights);
  return g;
}

DistributionSpec default_lpp_spec() { return DistributionSpec(Geometric{0.5}); }

namespace {

bool is_fair_geometric(const DistributionSpec& spec) {
  const auto* g = std::get_if<Geometric>(&spec.variant());
  return g && g->q == 0.5;
}

// F^{-1}(u) for q = 1/2 with u = (m + 1/2) 2^-53: the smallest k with
// 2^(52-k) <= r + 1/2, r = 2^53 - 1 - m, which is 53 - bit_width(r).
double fair_geometric(std::uint64_t draw) {
  const std::uint64_t r = ((std::uint64_t{1} << 53) - 1) - mantissa53(draw);
  return static_cast<double>(53 - std::bit_width(r));
}

}  // namespace

double lpp_vertex_weight(const DistributionSpec& spec, std::uint64_t seed, int i, int j) {
  const std::uint64_t draw = mix64(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
                                             static_cast<std::uint32_t>(j));
  if (is_fair_geometric(spec)) return fair_geometric(draw);
  return spec.inverse_cdf(open_unit(draw));
}

LppGrid sample_lpp(const DistributionSpec& spec, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("negative LPP side");
  LppGrid g;
  g.n = n;
  g.weights.resize(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) g.at(i, j) = lpp_vertex_weight(spec, seed, i, j);
  return g;
}

LppResult last_passage(const LppGrid& grid) {
  const int n = grid.n;
  const auto side = static_cast<std::size_t>(n + 1);
  std::vector<double> M(side * side);
  auto m = [&](int i, int j) -> double& { return M[static_cast<std::size_t>(i) * side + static_cast<std::size_t>(j)]; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      double best = 0;
      if (i > 0 && j > 0)
        best = std::max(m(i - 1, j), m(i, j - 1));
      else if (i > 0)
        best = m(i - 1, j);
      else if (j > 0)
        best = m(i, j - 1);
      m(i, j) = grid.at(i, j) + best;
    }
  LppResult out;
  out.T = m(n, n);
  int i = n, j = n;
  out.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (j == 0 || (i > 0 && m(i - 1, j) >= m(i, j - 1)))
      --i;
    else
      --j;
    out.path.emplace_back(i, j);
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

namespace {

template <class Weight>
double rolling_dp(int n, Weight&& weight) {
  std::vector<double> row(static_cast<std::size_t>(n + 1), 0.0);
  for (int i = 0; i <= n; ++i) {
    double left = 0;
    for (int j = 0; j <= n; ++j) {
      auto& up = row[static_cast<std::size_t>(j)];
      double best;
      if (i > 0 && j > 0)
        best = std::max(up, left);
      else if (i > 0)
        best = up;
      else
        best = left;
      up = weight(i, j) + best;
      left = up;
    }
  }
  return row.back();
}

}  // namespace

double last_passage_value(const LppGrid& grid) {
  return rolling_dp(grid.n, [&](int i, int j) { return grid.at(i, j); });
}

double last_passage_sampled(const DistributionSpec& spec, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("negative LPP side");
  if (is_fair_geometric(spec)) {
    return rolling_dp(n, [&](int i, int j) {
      return fair_geometric(mix64(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
                                            static_cast<std::uint32_t>(j)));
    });
  }
  return rolling_dp(n, [&](int i, int j) { return lpp_vertex_weight(spec, seed, i, j); });
}

double rescaled_statistic(double T, int n, double center, double power, double coeff) {
  if (n < 1) throw std::invalid_argument("rescaled_statistic needs n >= 1");
  return (T - center * n) / (coeff * std::pow(static_cast<double>(n), power));
}

double fit_lpp_center(const std::vector<int>& ns, const std::vector<double>& mean_T) {
  if (ns.size() != mean_T.size() || ns.size() < 2) throw std::invalid_argument("center fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::pow(static_cast<double>(ns[i]), -2.0 / 3.0);
    const double y = mean_T[i] / ns[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return (sy - slope * sx) / k;
}

}  // namespace fpplab
