#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fpplab/lattice.hpp"
#include "fpplab/weights.hpp"

namespace fpplab::ineq {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kMaxBits = 20;

/// Both sides are evaluated in floating point, so `holds` allows
/// lhs <= rhs + kTolerance * (1 + |lhs| + |rhs|).
inline constexpr double kTolerance = 1e-12;

/// f : {0,1}^k -> R, values indexed by bitmask (bit i of the index is x_i),
/// under the product measure with P(x_i = 1) = p.
struct HypercubeFunction {
  int k = 0;
  std::vector<double> values;
  double p = 0.5;

  HypercubeFunction() = default;
  HypercubeFunction(int k, std::vector<double> values, double p = 0.5);
  static HypercubeFunction from(int k, const std::function<double(std::uint32_t)>& f, double p = 0.5);

  std::size_t size() const { return values.size(); }
  /// Probability of the configuration with this bitmask.
  double weight(std::uint32_t x) const;
  /// Compensated sum of weight(x) g(x).
  double expectation(std::span<const double> g) const;
  double mean() const { return expectation(values); }
  double variance() const;
};

/// Increments Delta_i f = E[f | F_i] - E[f | F_{i-1}] for the filtration that
/// reveals the bits in `order` (bit index order by default).
struct MartingaleDecomposition {
  std::vector<int> order;
  std::vector<std::vector<double>> increments;

  static MartingaleDecomposition build(const HypercubeFunction& f, std::vector<int> order = {});
};

/// Ent X = E[X log(X / E X)] with 0 log 0 = 0; X = 0 almost surely has entropy 0.
/// Throws std::invalid_argument on negative values or a bad distribution.
double entropy(std::span<const double> values, std::span<const double> probs);

struct CheckResult {
  std::string check;
  /// FNV-1a digest of the inputs, hex.
  std::string digest;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  bool holds = true;
  /// Equality up to the tolerance.
  bool equality = false;
  /// The statement is vacuous on this input (e.g. Var f = 0).
  bool vacuous = false;
};

CheckResult make_result(std::string check, std::string digest, double lhs, double rhs);

/// Var f <= (1/2) sum_i E[(f(X) - f(X with bit i resampled))^2].
CheckResult efron_stein_check(const HypercubeFunction& f);

struct FsReport {
  CheckResult fs;
  double variance = 0;
  /// sum_i (E|Delta_i f|)^2.
  double l1_sum = 0;
  /// Ent (Delta_i)^2 >= E Delta_i^2 log(E Delta_i^2 / (E|Delta_i|)^2), one per increment.
  std::vector<CheckResult> entlow;
  /// Telescoping, orthogonality and Parseval residuals of the decomposition.
  double telescoping_error = 0;
  double orthogonality_error = 0;
  double parseval_error = 0;
  bool holds() const;
};

/// Var f log(Var f / sum_i (E|Delta_i f|)^2) <= sum_i Ent (Delta_i f)^2.
FsReport falik_samorodnitsky_check(const HypercubeFunction& f, std::vector<int> order = {});

/// Ent f^2 <= (1/2)|f(0) - f(1)|^2 under the fair two-point measure.
CheckResult log_sobolev_check(double f0, double f1);

/// Ent f <= sum_i E Ent_i f for f >= 0.
CheckResult tensorization_check(const HypercubeFunction& f);

struct VariationalReport {
  double entropy = 0;
  /// Largest E[f g] over feasible trials (-inf when none is feasible).
  double best_feasible = 0;
  /// E[f g*] for g* = log(f / E f) on {f > 0}.
  double optimizer_value = 0;
  std::vector<std::size_t> infeasible;
  bool holds = true;
  bool optimizer_attains = true;
};

/// Every trial g with E e^g <= 1 satisfies E[f g] <= Ent f, and g* attains it.
VariationalReport entropy_variational_check(const HypercubeFunction& f, const std::vector<std::vector<double>>& trials);

/// Nonnegative nondecreasing right-continuous step function on [0, 1]:
/// values[k] on [breaks[k-1], breaks[k]), with breaks increasing in (0, 1).
struct StepFunction {
  std::vector<Rational> breaks;
  std::vector<Rational> values;

  Rational operator()(const Rational& x) const;
  /// Integral of f^2 over [lo, hi].
  Rational square_integral(const Rational& lo, const Rational& hi) const;
};

struct RossignolReport {
  Rational lhs;
  Rational rhs_tail;
  Rational rhs_a_below_tau;
  Rational rhs_tau_below_a;
  bool a_below_tau = false;
  bool tau_below_a = false;
  bool holds_tail = true;
  bool holds_a_below_tau = true;
  bool holds_tau_below_a = true;
  bool holds() const { return holds_tail && holds_a_below_tau && holds_tau_below_a; }
};

/// int_tau^1 (f(x) - f(x - tau))^2 dx against the three right-hand sides, in
/// exact rationals. A case whose hypothesis on (a, tau) fails has its flag
/// cleared and counts as holding. Throws std::invalid_argument unless f is
/// nonnegative, nondecreasing and constant on [a, 1], and 0 < tau <= 1/2.
RossignolReport rossignol_check(const StepFunction& f, const Rational& a, const Rational& tau);

/// A law of Z given through its centered log-MGF and upper tail.
struct MgfLaw {
  /// log E exp(s (Z - E Z)).
  std::function<double(double)> log_mgf;
  /// P(Z - E Z >= lambda).
  std::function<double(double)> upper_tail;
};

MgfLaw empirical_law(std::span<const double> sample);
MgfLaw gaussian_law(double sigma);

struct MgfPoint {
  double t = 0;
  /// Var e^{tZ/2} / E e^{tZ}.
  double premise_ratio = 0;
  bool premise = true;
  double psi = 0;
  double psi_bound = 0;
  bool psi_holds = true;
};

struct TailPoint {
  double lambda = 0;
  double tail = 0;
  double bound = 0;
  bool holds = true;
};

struct MgfReport {
  double C = 0;
  double B = 0;
  std::vector<MgfPoint> grid;
  std::vector<TailPoint> tails;
  bool premise_holds = true;
  /// The conclusions on every grid point whose premise holds up to that point.
  bool chain_holds = true;
};

/// Grid t_j = B^{-1/2} j / 64, j = 1..63. Premise Var e^{tZ/2} <= C t^2 E e^{tZ};
/// conclusions psi(t) <= -2 log(1 - C t^2) for the centered log-MGF psi and
/// P(Z - EZ >= lambda) <= min_t e^{-t lambda} / (1 - C t^2)^2.
MgfReport mgf_concentration_check(const MgfLaw& law, double C, double B, std::span<const double> lambdas);

struct ExhaustiveReport {
  int edges = 0;
  std::vector<double> passage;  // T per configuration, bit e = 1 means weight a
  double variance = 0;
  CheckResult efron_stein;
  FsReport fs;
};

/// Enumerates every configuration of a two-point law on the edges of `box`
/// (at most kMaxBits edges) and checks Efron-Stein and FS exactly.
ExhaustiveReport fpp_exhaustive_check(const Region& box, const Site& src, const Site& dst, const DistributionSpec& spec);

// ---- randomized suites ----------------------------------------------------

struct SuiteSummary {
  std::string check;
  std::int64_t instances = 0;
  std::int64_t violations = 0;
  std::int64_t equalities = 0;
  std::int64_t vacuous = 0;
  double min_margin = 0;
  /// Inputs digest of the smallest-margin instance.
  std::string worst_digest;
  bool passed() const { return violations == 0; }
};

/// Names accepted by run_suite: efron-stein, falik-samorodnitsky, entlow, log-sobolev,
/// tensorization, variational, rossignol, mgf, exhaustive; "all" runs each.
std::vector<std::string> suite_names();

/// Runs `instances` random instances per check; instance i uses mix64(seed, i),
/// so the result does not depend on the thread count.
std::vector<SuiteSummary> run_suite(const std::string& name, std::int64_t instances, std::uint64_t seed, int threads = 0);

}  // namespace fpplab::ineq
