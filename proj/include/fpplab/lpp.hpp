#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fpplab/weights.hpp"

namespace fpplab {

/// Vertex weights on {0..n}^2 for directed last passage, row-major in i.
struct LppGrid {
  int n = 0;
  std::vector<double> weights;

  double at(int i, int j) const { return weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(j)]; }
  double& at(int i, int j) { return weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(j)]; }

  static LppGrid from_weights(int n, std::vector<double> weights);
};

/// Default law: P(w = k) = 2^-(k+1), mean 1.
DistributionSpec default_lpp_spec();

/// Weight of vertex (i, j): F^{-1} of the uniform behind mix64(seed, i << 32 | j).
double lpp_vertex_weight(const DistributionSpec& spec, std::uint64_t seed, int i, int j);

LppGrid sample_lpp(const DistributionSpec& spec, int n, std::uint64_t seed);

struct LppResult {
  double T = 0;
  /// Argmax path from (0,0) to (n,n); ties prefer the (i-1, j) predecessor.
  std::vector<std::pair<int, int>> path;
};

/// M(i,j) = w(i,j) + max(M(i-1,j), M(i,j-1)); T = M(n,n).
LppResult last_passage(const LppGrid& grid);

/// T only, two rolling rows.
double last_passage_value(const LppGrid& grid);

/// T only for a sampled grid, drawing weights on the fly in O(n) memory.
double last_passage_sampled(const DistributionSpec& spec, int n, std::uint64_t seed);

/// 2^(4/3).
inline constexpr double kJohanssonScale = 0x1.428a2f98d728bp+1;
/// Centering constant of the Johansson statement (4n).
inline constexpr double kJohanssonCenter = 4.0;

/// Z = (T - center n) / (coeff n^power).
double rescaled_statistic(double T, int n, double center, double power = 1.0 / 3.0, double coeff = kJohanssonScale);

/// Time constant extrapolated from mean(T_n)/n ~ c + a n^(-2/3) by least squares.
double fit_lpp_center(const std::vector<int>& ns, const std::vector<double>& mean_T);

}  // namespace fpplab
