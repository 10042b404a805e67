#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fpplab/lattice.hpp"

namespace fpplab {

/// Two-point law: weight `a` with probability `p`, weight `b` otherwise.
struct Bernoulli {
  double a = 1;
  double b = 2;
  double p = 0.5;
};
struct Uniform {
  double lo = 0;
  double hi = 1;
};
struct Exponential {
  double rate = 1;
};
/// P(t = k) = (1 - q) q^k on {0, 1, 2, ...}; mean q / (1 - q).
struct Geometric {
  double q = 0.5;
};
/// Purely atomic law given by its CDF at the atoms: (x_i, F(x_i)) with x_i and
/// F(x_i) increasing and the last F equal to 1.
struct TableCDF {
  std::vector<std::pair<double, double>> points;
};

/// An edge-weight distribution mu on [0, inf) with CDF F and right-continuous
/// inverse F^{-1}(y) = inf{x : F(x) >= y}.
class DistributionSpec {
 public:
  using Variant = std::variant<Bernoulli, Uniform, Exponential, Geometric, TableCDF>;

  DistributionSpec(Variant v);  // NOLINT(google-explicit-constructor)

  /// Parses the mini-grammar `name:param,param,...`:
  ///   bernoulli:a,b,p  uniform:lo,hi  exponential:rate  geometric:q
  ///   table:x1,F1,x2,F2,...  point:c (alias for table:c,1)
  static DistributionSpec parse(const std::string& text);
  std::string to_string() const;

  const Variant& variant() const { return v_; }

  double cdf(double x) const;
  /// F(x^-), the mass strictly below x.
  double cdf_below(double x) const;
  /// Throws std::domain_error unless 0 < y < 1.
  double inverse_cdf(double y) const;
  /// inf{x : F(x) > 0}.
  double infimum() const { return infimum_; }

  double atom_at_zero() const { return cdf(0.0); }
  double mean() const;
  double second_moment() const;
  /// Finite list of (atom, probability) for purely atomic laws with finitely
  /// many atoms; empty otherwise.
  std::vector<std::pair<double, double>> atoms() const;
  bool atomic() const;

  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b);

 private:
  void validate() const;
  Variant v_;
  double infimum_ = 0;
};

/// Accepted critical bond-percolation thresholds; exact for d = 2.
double critical_probability(int dim);

/// Throws std::invalid_argument when mu({0}) >= p_c(d). Returns a warning for
/// d >= 3, where p_c is only known numerically.
std::optional<std::string> check_fpp_admissible(const DistributionSpec& spec, int dim);

/// Stable 64-bit key of a lattice edge, independent of the region it is
/// indexed in, so a grown window reproduces the weights of the edges it shares
/// with the smaller one.
std::uint64_t lattice_edge_key(const EdgeId& e);

/// Raw 64-bit draw behind the weight of edge `e`: mix64(seed, lattice_edge_key(e)).
std::uint64_t edge_draw(std::uint64_t seed, const EdgeId& e);

/// Dyadic depth J of sampled uniforms (binary64 mantissa).
inline constexpr int kDyadicDepth = 53;

/// i.i.d. edge weights on a region. Sampled fields are a pure function of
/// (seed, spec, region, depth): edge e gets F^{-1}(u) with u = (k + 1/2) 2^-J
/// and k the top J bits of edge_draw(seed, e).
class WeightField {
 public:
  static WeightField sample(const DistributionSpec& spec, const Region& region, std::uint64_t seed,
                            bool for_fpp = true, int depth = kDyadicDepth);
  /// Explicit weights (tests, oracles). Such fields cannot be resampled on a
  /// larger window.
  static WeightField from_weights(const Region& region, std::vector<double> weights,
                                  std::optional<DistributionSpec> spec = std::nullopt);

  const Region& region() const { return region_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::int64_t edge) const { return weights_[static_cast<std::size_t>(edge)]; }
  std::uint64_t seed() const { return seed_; }
  const std::optional<DistributionSpec>& spec() const { return spec_; }
  bool resamplable() const { return sampled_; }
  int depth() const { return depth_; }

  /// Same seed and spec on another region.
  WeightField resample(const Region& region) const;
  /// Copy with one weight replaced.
  WeightField with_weight(std::int64_t edge, double value) const;
  WeightField scaled(double factor) const;

  /// Smallest power-of-two (then power-of-ten) factor turning every weight
  /// into an integer, if one up to 2^30 exists; 0 when weights are generic.
  std::int64_t integer_scale() const { return integer_scale_; }

 private:
  WeightField() = default;
  void detect_scale();

  Region region_ = Region::torus(2, 3);
  std::vector<double> weights_;
  std::uint64_t seed_ = 0;
  std::optional<DistributionSpec> spec_;
  bool sampled_ = false;
  int depth_ = kDyadicDepth;
  std::int64_t integer_scale_ = 0;
};

WeightField sample_field(const DistributionSpec& spec, const Region& region, std::uint64_t seed);

/// Truncated dyadic encoding of the uniforms behind a field: bit j (1-based)
/// of edge e carries weight 2^-j, U_e = sum_j bit_j 2^-j.
class DyadicCode {
 public:
  static constexpr int kDefaultDepth = kDyadicDepth;

  DyadicCode(std::int64_t num_edges, int depth);
  static DyadicCode encode(const Region& region, std::uint64_t seed, int depth = kDefaultDepth);

  int depth() const { return depth_; }
  std::int64_t num_edges() const { return static_cast<std::int64_t>(mantissa_.size()); }
  bool bit(std::int64_t edge, int j) const;
  void set_bit(std::int64_t edge, int j, bool value);
  std::vector<std::uint8_t> bits(std::int64_t edge) const;
  double value(std::int64_t edge) const;

 private:
  int depth_;
  std::vector<std::uint64_t> mantissa_;
};

enum class FlipDirection { Down, Up };

/// sum_j bits[j-1] 2^-j.
double dyadic_value(std::span<const std::uint8_t> bits);

/// F^{-1}(U); U = 0 maps to the infimum of the support.
double dyadic_weight(const DistributionSpec& spec, double u);

/// Weight of `edge` after forcing bit j to 1 (Up) or 0 (Down). Throws
/// std::out_of_range unless 1 <= j <= depth.
double dyadic_flip(const DyadicCode& code, const DistributionSpec& spec, std::int64_t edge, int j,
                   FlipDirection direction);

/// w = 1 - log F(t). Throws std::domain_error when F(t) = 0.
double log_cdf_weight(const DistributionSpec& spec, double t);

}  // namespace fpplab
