#include "fpplab/ineqlab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <omp.h>
#include <stdexcept>

#include "fpplab/fpp.hpp"
#include "fpplab/rng.hpp"

namespace fpplab::ineq {

namespace {

// Neumaier summation.
class Sum {
 public:
  void add(double x) {
    const double t = s_ + x;
    c_ += std::abs(s_) >= std::abs(x) ? (s_ - t) + x : (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0, c_ = 0;
};

class Digest {
 public:
  Digest& add(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Digest& add(double x) { return add(&x, sizeof x); }
  Digest& add(std::span<const double> xs) { return add(xs.data(), xs.size_bytes()); }
  Digest& add(const std::string& s) { return add(s.data(), s.size()); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string digest_of(const HypercubeFunction& f) {
  return Digest().add(static_cast<double>(f.k)).add(f.p).add(f.values).hex();
}

bool within(double lhs, double rhs) { return lhs <= rhs + kTolerance * (1 + std::abs(lhs) + std::abs(rhs)); }

std::vector<double> weights_of(int k, double p) {
  std::vector<double> w(std::size_t{1} << k);
  for (std::size_t x = 0; x < w.size(); ++x) {
    const int ones = std::popcount(x);
    w[x] = std::pow(p, ones) * std::pow(1 - p, k - ones);
  }
  return w;
}

}  // namespace

HypercubeFunction::HypercubeFunction(int k_, std::vector<double> values_, double p_)
    : k(k_), values(std::move(values_)), p(p_) {
  if (k < 0 || k > kMaxBits) throw std::invalid_argument("hypercube dimension must lie in [0, 20]");
  if (values.size() != (std::size_t{1} << k)) throw std::invalid_argument("hypercube function needs 2^k values");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("bit probability must lie in [0, 1]");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("hypercube function values must be finite");
}

HypercubeFunction HypercubeFunction::from(int k, const std::function<double(std::uint32_t)>& f, double p) {
  if (k < 0 || k > kMaxBits) throw std::invalid_argument("hypercube dimension must lie in [0, 20]");
  std::vector<double> v(std::size_t{1} << k);
  for (std::uint32_t x = 0; x < v.size(); ++x) v[x] = f(x);
  return {k, std::move(v), p};
}

double HypercubeFunction::weight(std::uint32_t x) const {
  const int ones = std::popcount(x);
  return std::pow(p, ones) * std::pow(1 - p, k - ones);
}

double HypercubeFunction::expectation(std::span<const double> g) const {
  if (g.size() != values.size()) throw std::invalid_argument("expectation needs 2^k values");
  Sum s;
  if (p == 0.5) {
    for (double v : g) s.add(v);
    return std::ldexp(s.value(), -k);
  }
  const auto w = weights_of(k, p);
  for (std::size_t x = 0; x < g.size(); ++x) s.add(w[x] * g[x]);
  return s.value();
}

double HypercubeFunction::variance() const {
  const double m = mean();
  std::vector<double> sq(values.size());
  for (std::size_t x = 0; x < values.size(); ++x) sq[x] = (values[x] - m) * (values[x] - m);
  return expectation(sq);
}

MartingaleDecomposition MartingaleDecomposition::build(const HypercubeFunction& f, std::vector<int> order) {
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(f.k));
    std::iota(order.begin(), order.end(), 0);
  }
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < f.k; ++i)
      if (static_cast<int>(sorted.size()) != f.k || sorted[static_cast<std::size_t>(i)] != i)
        throw std::invalid_argument("filtration order must be a permutation of the bits");
  }
  MartingaleDecomposition out;
  out.order = order;
  out.increments.resize(static_cast<std::size_t>(f.k));
  // cond holds E[f | F_i]; averaging out the last revealed bit gives E[f | F_{i-1}].
  std::vector<double> cond = f.values;
  for (int i = f.k; i >= 1; --i) {
    const std::uint32_t bit = 1u << order[static_cast<std::size_t>(i - 1)];
    std::vector<double> prev(cond.size());
    for (std::uint32_t x = 0; x < cond.size(); ++x) {
      const double avg = f.p * cond[x | bit] + (1 - f.p) * cond[x & ~bit];
      prev[x] = avg;
    }
    auto& inc = out.increments[static_cast<std::size_t>(i - 1)];
    inc.resize(cond.size());
    for (std::size_t x = 0; x < cond.size(); ++x) inc[x] = cond[x] - prev[x];
    cond = std::move(prev);
  }
  return out;
}

double entropy(std::span<const double> values, std::span<const double> probs) {
  if (values.size() != probs.size()) throw std::invalid_argument("entropy needs one probability per value");
  Sum total, mean;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw std::invalid_argument("entropy needs nonnegative values");
    if (!(probs[i] >= 0)) throw std::invalid_argument("probabilities must be nonnegative");
    total.add(probs[i]);
    mean.add(probs[i] * values[i]);
  }
  if (std::abs(total.value() - 1) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
  const double m = mean.value();
  if (m <= 0) return 0;
  Sum ent;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > 0 && probs[i] > 0) ent.add(probs[i] * values[i] * std::log(values[i] / m));
  // Jensen gives Ent >= 0; a negative sum is rounding.
  return std::max(0.0, ent.value());
}

CheckResult make_result(std::string check, std::string digest, double lhs, double rhs) {
  CheckResult r;
  r.check = std::move(check);
  r.digest = std::move(digest);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.holds = within(lhs, rhs);
  r.equality = r.holds && within(rhs, lhs);
  return r;
}

CheckResult efron_stein_check(const HypercubeFunction& f) {
  const auto w = weights_of(f.k, f.p);
  Sum es;
  for (int i = 0; i < f.k; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t x = 0; x < f.size(); ++x) {
      if (x & bit) continue;
      const double d = f.values[x | bit] - f.values[x];
      // x has bit i = 0 with weight (1 - p) P(others); the pair differs with probability 2p(1-p).
      es.add(f.p * w[x] * d * d);
    }
  }
  return make_result("efron-stein", digest_of(f), f.variance(), es.value());
}

bool FsReport::holds() const {
  if (!fs.holds) return false;
  return std::all_of(entlow.begin(), entlow.end(), [](const CheckResult& r) { return r.holds; });
}

FsReport falik_samorodnitsky_check(const HypercubeFunction& f, std::vector<int> order) {
  FsReport rep;
  const std::string digest = digest_of(f);
  const auto dec = MartingaleDecomposition::build(f, std::move(order));
  const auto w = weights_of(f.k, f.p);
  rep.variance = f.variance();

  Sum l1sum, rhs, parseval;
  for (const auto& inc : dec.increments) {
    std::vector<double> abs(inc.size()), sq(inc.size());
    for (std::size_t x = 0; x < inc.size(); ++x) {
      abs[x] = std::abs(inc[x]);
      sq[x] = inc[x] * inc[x];
    }
    const double e1 = f.expectation(abs);
    const double e2 = f.expectation(sq);
    l1sum.add(e1 * e1);
    parseval.add(e2);
    const double ent = entropy(sq, w);
    rhs.add(ent);
    const double low = e2 > 0 ? e2 * std::log(e2 / (e1 * e1)) : 0.0;
    rep.entlow.push_back(make_result("entlow", digest, low, ent));
  }
  rep.l1_sum = l1sum.value();
  rep.parseval_error = std::abs(parseval.value() - rep.variance);

  const double mean = f.mean();
  for (std::size_t x = 0; x < f.size(); ++x) {
    Sum s;
    for (const auto& inc : dec.increments) s.add(inc[x]);
    rep.telescoping_error = std::max(rep.telescoping_error, std::abs(s.value() - (f.values[x] - mean)));
  }
  for (std::size_t i = 0; i < dec.increments.size(); ++i)
    for (std::size_t j = i + 1; j < dec.increments.size(); ++j) {
      std::vector<double> prod(f.size());
      for (std::size_t x = 0; x < f.size(); ++x) prod[x] = dec.increments[i][x] * dec.increments[j][x];
      rep.orthogonality_error = std::max(rep.orthogonality_error, std::abs(f.expectation(prod)));
    }

  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  if (f.size() == 0 || *lo == *hi || rep.variance <= 0 || rep.l1_sum <= 0) {
    rep.fs = make_result("falik-samorodnitsky", digest, 0, rhs.value());
    rep.fs.vacuous = true;
    return rep;
  }
  rep.fs = make_result("falik-samorodnitsky", digest, rep.variance * std::log(rep.variance / rep.l1_sum), rhs.value());
  return rep;
}

CheckResult log_sobolev_check(double f0, double f1) {
  const double v[2] = {f0 * f0, f1 * f1};
  const double p[2] = {0.5, 0.5};
  const std::string digest = Digest().add(f0).add(f1).hex();
  return make_result("log-sobolev", digest, entropy(v, p), 0.5 * (f0 - f1) * (f0 - f1));
}

CheckResult tensorization_check(const HypercubeFunction& f) {
  const auto w = weights_of(f.k, f.p);
  const double lhs = entropy(f.values, w);
  const double q[2] = {1 - f.p, f.p};
  Sum rhs;
  for (int i = 0; i < f.k; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t x = 0; x < f.size(); ++x) {
      if (x & bit) continue;
      const double pair[2] = {f.values[x], f.values[x | bit]};
      // Probability of the other coordinates is w[x] / (1 - p).
      const double others = f.p < 1 ? w[x] / (1 - f.p) : 0.0;
      if (others > 0) rhs.add(others * entropy(pair, q));
    }
  }
  return make_result("tensorization", digest_of(f), lhs, rhs.value());
}

VariationalReport entropy_variational_check(const HypercubeFunction& f, const std::vector<std::vector<double>>& trials) {
  VariationalReport rep;
  const auto w = weights_of(f.k, f.p);
  rep.entropy = entropy(f.values, w);
  const double mean = f.mean();
  if (!(mean > 0)) throw std::invalid_argument("variational check needs E f > 0");
  rep.best_feasible = -INFINITY;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const auto& g = trials[t];
    if (g.size() != f.size()) throw std::invalid_argument("trial function needs 2^k values");
    std::vector<double> eg(g.size()), fg(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
      eg[x] = std::exp(g[x]);
      fg[x] = f.values[x] * g[x];
    }
    // Rounding in the product weights can push E e^0 a hair above 1.
    if (!(f.expectation(eg) <= 1 + kTolerance)) {
      rep.infeasible.push_back(t);
      continue;
    }
    const double v = f.expectation(fg);
    rep.best_feasible = std::max(rep.best_feasible, v);
    if (!within(v, rep.entropy + kTolerance * mean)) rep.holds = false;
  }
  std::vector<double> fg(f.size(), 0.0);
  for (std::size_t x = 0; x < f.size(); ++x)
    if (f.values[x] > 0) fg[x] = f.values[x] * std::log(f.values[x] / mean);
  rep.optimizer_value = f.expectation(fg);
  rep.optimizer_attains = std::abs(rep.optimizer_value - rep.entropy) <= 1e-10 * (1 + rep.entropy);
  return rep;
}

Rational StepFunction::operator()(const Rational& x) const {
  const auto k = std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin();
  return values[static_cast<std::size_t>(k)];
}

Rational StepFunction::square_integral(const Rational& lo, const Rational& hi) const {
  Rational total = 0;
  Rational left = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Rational right = k < breaks.size() ? breaks[k] : Rational(1);
    const Rational a = std::max(left, lo), b = std::min(right, hi);
    if (a < b) total += values[k] * values[k] * (b - a);
    left = right;
  }
  return total;
}

RossignolReport rossignol_check(const StepFunction& f, const Rational& a, const Rational& tau) {
  if (f.values.size() != f.breaks.size() + 1) throw std::invalid_argument("step function needs one more value than breaks");
  for (std::size_t k = 0; k < f.breaks.size(); ++k) {
    if (!(f.breaks[k] > 0 && f.breaks[k] < 1)) throw std::invalid_argument("breaks must lie in (0, 1)");
    if (k > 0 && !(f.breaks[k] > f.breaks[k - 1])) throw std::invalid_argument("breaks must increase");
    if (f.breaks[k] > a && f.values[k + 1] != f.values[k])
      throw std::invalid_argument("f must be constant on [a, 1]");
  }
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.values[k] < 0) throw std::invalid_argument("f must be nonnegative");
    if (k > 0 && f.values[k] < f.values[k - 1]) throw std::invalid_argument("f must be nondecreasing");
  }
  if (!(a >= 0 && a <= 1)) throw std::invalid_argument("a must lie in [0, 1]");
  const Rational half(1, 2);
  if (!(tau > 0 && tau <= half)) throw std::invalid_argument("tau must lie in (0, 1/2]");

  // f(x) - f(x - tau) is constant between consecutive points of this partition.
  std::vector<Rational> cuts{tau, Rational(1)};
  for (const auto& b : f.breaks) {
    if (b > tau && b < 1) cuts.push_back(b);
    if (b + tau < 1) cuts.push_back(b + tau);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  RossignolReport rep;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Rational d = f(cuts[i]) - f(cuts[i] - tau);
    rep.lhs += d * d * (cuts[i + 1] - cuts[i]);
  }
  const Rational total = f.square_integral(0, 1);
  rep.rhs_tail = f.square_integral(1 - tau, 1);
  rep.rhs_a_below_tau = 2 * a * total;
  rep.rhs_tau_below_a = 2 * tau * total;
  rep.a_below_tau = a <= tau;
  rep.tau_below_a = tau <= a && a <= half;
  rep.holds_tail = rep.lhs <= rep.rhs_tail;
  rep.holds_a_below_tau = !rep.a_below_tau || rep.lhs <= rep.rhs_a_below_tau;
  rep.holds_tau_below_a = !rep.tau_below_a || rep.lhs <= rep.rhs_tau_below_a;
  return rep;
}

MgfLaw empirical_law(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("empirical law needs a sample");
  Sum s;
  for (double z : sample) s.add(z);
  const double mean = s.value() / static_cast<double>(sample.size());
  auto centered = std::make_shared<std::vector<double>>();
  for (double z : sample) centered->push_back(z - mean);
  std::sort(centered->begin(), centered->end());
  MgfLaw law;
  law.log_mgf = [centered](double t) {
    double top = -INFINITY;
    for (double z : *centered) top = std::max(top, t * z);
    Sum acc;
    for (double z : *centered) acc.add(std::exp(t * z - top));
    return top + std::log(acc.value() / static_cast<double>(centered->size()));
  };
  law.upper_tail = [centered](double lambda) {
    const auto it = std::lower_bound(centered->begin(), centered->end(), lambda);
    return static_cast<double>(centered->end() - it) / static_cast<double>(centered->size());
  };
  return law;
}

MgfLaw gaussian_law(double sigma) {
  if (!(sigma >= 0)) throw std::invalid_argument("sigma must be nonnegative");
  MgfLaw law;
  law.log_mgf = [sigma](double t) { return 0.5 * t * t * sigma * sigma; };
  law.upper_tail = [sigma](double lambda) {
    if (sigma == 0) return lambda <= 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(lambda / (sigma * std::sqrt(2.0)));
  };
  return law;
}

MgfReport mgf_concentration_check(const MgfLaw& law, double C, double B, std::span<const double> lambdas) {
  if (!(C > 0 && C <= B)) throw std::invalid_argument("constants must satisfy 0 < C <= B");
  MgfReport rep;
  rep.C = C;
  rep.B = B;
  bool prefix = true;
  std::vector<std::size_t> usable;
  for (int j = 1; j <= 63; ++j) {
    MgfPoint pt;
    pt.t = j / (64 * std::sqrt(B));
    const double t2 = pt.t * pt.t;
    // Var e^{tZ/2} / E e^{tZ} = 1 - (E e^{tZ/2})^2 / E e^{tZ}, shift invariant.
    pt.premise_ratio = -std::expm1(2 * law.log_mgf(pt.t / 2) - law.log_mgf(pt.t));
    pt.premise = within(pt.premise_ratio, C * t2);
    pt.psi = law.log_mgf(pt.t);
    pt.psi_bound = -2 * std::log1p(-C * t2);
    pt.psi_holds = within(pt.psi, pt.psi_bound);
    rep.premise_holds = rep.premise_holds && pt.premise;
    prefix = prefix && pt.premise;
    if (prefix) {
      usable.push_back(rep.grid.size());
      if (!pt.psi_holds) rep.chain_holds = false;
    }
    rep.grid.push_back(pt);
  }
  for (double lambda : lambdas) {
    TailPoint tp;
    tp.lambda = lambda;
    tp.tail = law.upper_tail(lambda);
    tp.bound = 1;
    for (std::size_t i : usable) {
      const double t = rep.grid[i].t;
      const double q = 1 - C * t * t;
      tp.bound = std::min(tp.bound, std::exp(-t * lambda) / (q * q));
    }
    tp.holds = within(tp.tail, tp.bound);
    rep.chain_holds = rep.chain_holds && tp.holds;
    rep.tails.push_back(tp);
  }
  return rep;
}

ExhaustiveReport fpp_exhaustive_check(const Region& box, const Site& src, const Site& dst, const DistributionSpec& spec) {
  const auto atoms = spec.atoms();
  if (atoms.empty() || atoms.size() > 2) throw std::invalid_argument("exhaustive check needs a law with one or two atoms");
  const std::int64_t m = box.num_edges();
  if (m > kMaxBits) throw std::invalid_argument("exhaustive check allows at most 20 edges");
  const double a = atoms[0].first;
  const double b = atoms.size() == 2 ? atoms[1].first : a;
  const double p = atoms[0].second;
  ExhaustiveReport rep;
  rep.edges = static_cast<int>(m);
  const int k = static_cast<int>(m);
  rep.passage.resize(std::size_t{1} << k);
  std::vector<double> w(static_cast<std::size_t>(m));
  for (std::uint32_t x = 0; x < rep.passage.size(); ++x) {
    for (int e = 0; e < k; ++e) w[static_cast<std::size_t>(e)] = ((x >> e) & 1) ? a : b;
    rep.passage[x] = passage_value(WeightField::from_weights(box, w), src, dst);
  }
  const HypercubeFunction f(k, rep.passage, p);
  rep.variance = f.variance();
  rep.efron_stein = efron_stein_check(f);
  rep.fs = falik_samorodnitsky_check(f);
  return rep;
}

// ---- randomized suites ----------------------------------------------------

namespace {

constexpr std::uint64_t kSuiteKey = 0x1E9A1AB5ULL;

// Random function on k bits drawn from a handful of families, so that
// degenerate, boolean and sparse cases all appear.
HypercubeFunction random_function(CounterStream& rng, bool nonnegative, bool fair) {
  const int k = 1 + static_cast<int>(rng.below(8));
  const double p = (fair || rng.uniform() < 0.5) ? 0.5 : 0.05 + 0.9 * rng.uniform();
  const auto family = rng.below(5);
  std::vector<double> v(std::size_t{1} << k);
  const int relevant = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  const std::uint32_t mask = (1u << relevant) - 1;
  std::vector<double> table(std::size_t{1} << relevant);
  for (double& t : table) t = static_cast<double>(rng.below(2));
  for (std::uint32_t x = 0; x < v.size(); ++x) {
    switch (family) {
      case 0:
        v[x] = 10 * rng.uniform() - (nonnegative ? 0 : 5);
        break;
      case 1:
        v[x] = static_cast<double>(rng.below(2));
        break;
      case 2:
        // Boolean function of the first few bits; the rest are noise.
        v[x] = table[x & mask];
        break;
      case 3:
        v[x] = rng.uniform() < 0.8 ? 0.0 : 1 + 5 * rng.uniform();
        break;
      default:
        v[x] = static_cast<double>(std::popcount(x & mask)) + (nonnegative ? 0 : -0.5 * relevant);
        break;
    }
  }
  if (nonnegative && std::all_of(v.begin(), v.end(), [](double y) { return y == 0; })) v[0] = 1;
  return {k, std::move(v), p};
}

std::vector<int> random_order(CounterStream& rng, int k) {
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  for (int i = k - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)], order[rng.below(static_cast<std::uint64_t>(i + 1))]);
  return order;
}

Rational random_rational(CounterStream& rng, std::int64_t den) {
  return Rational(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den + 1))), den);
}

struct Outcome {
  double margin = 0;
  bool holds = true;
  bool equality = false;
  bool vacuous = false;
  std::string digest;
};

Outcome from(const CheckResult& r) { return {r.margin, r.holds, r.equality, r.vacuous, r.digest}; }

std::vector<Outcome> one_instance(const std::string& name, std::uint64_t key) {
  CounterStream rng(key);
  if (name == "efron-stein") return {from(efron_stein_check(random_function(rng, false, false)))};
  if (name == "falik-samorodnitsky" || name == "entlow") {
    const auto f = random_function(rng, false, false);
    auto order = rng.uniform() < 0.5 ? random_order(rng, f.k) : std::vector<int>{};
    const auto rep = falik_samorodnitsky_check(f, std::move(order));
    if (name == "falik-samorodnitsky") {
      Outcome o = from(rep.fs);
      const double scale = 1 + rep.variance;
      if (rep.telescoping_error > 1e-12 * (1 + f.size()) || rep.orthogonality_error > 1e-12 * scale ||
          rep.parseval_error > 1e-12 * scale)
        o.holds = false;
      return {o};
    }
    std::vector<Outcome> out;
    for (const auto& r : rep.entlow) out.push_back(from(r));
    return out;
  }
  if (name == "log-sobolev") return {from(log_sobolev_check(10 * rng.uniform(), 10 * rng.uniform()))};
  if (name == "tensorization") return {from(tensorization_check(random_function(rng, true, false)))};
  if (name == "variational") {
    const auto f = random_function(rng, true, false);
    std::vector<std::vector<double>> trials;
    for (int t = 0; t < 4; ++t) {
      std::vector<double> g(f.size());
      for (double& y : g) y = 6 * rng.uniform() - 3;
      std::vector<double> eg(g.size());
      for (std::size_t x = 0; x < g.size(); ++x) eg[x] = std::exp(g[x]);
      // Shift so that E e^g = e^{-delta} <= 1.
      const double shift = std::log(f.expectation(eg)) + 1e-9 + rng.uniform();
      for (double& y : g) y -= shift;
      trials.push_back(std::move(g));
    }
    trials.emplace_back(f.size(), 0.0);
    const auto rep = entropy_variational_check(f, trials);
    Outcome o;
    o.margin = rep.entropy - rep.best_feasible;
    o.holds = rep.holds && rep.optimizer_attains && rep.infeasible.empty();
    o.equality = o.margin <= kTolerance * (1 + rep.entropy);
    o.digest = digest_of(f);
    return {o};
  }
  if (name == "rossignol") {
    const std::int64_t den = 1 + static_cast<std::int64_t>(rng.below(64));
    Rational a = random_rational(rng, den);
    Rational tau = Rational(1 + static_cast<std::int64_t>(rng.below(32)), 64);
    StepFunction f;
    const auto jumps = rng.below(6);
    std::vector<Rational> pts;
    for (std::uint64_t i = 0; i < jumps; ++i) {
      const Rational b = a * random_rational(rng, den);
      if (b > 0 && b < 1) pts.push_back(b);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    f.breaks = pts;
    Rational level = random_rational(rng, 4);
    f.values.push_back(level);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      level += random_rational(rng, 8);
      f.values.push_back(level);
    }
    const auto rep = rossignol_check(f, a, tau);
    Outcome o;
    Rational margin = rep.rhs_tail - rep.lhs;
    if (rep.a_below_tau) margin = std::min(margin, Rational(rep.rhs_a_below_tau - rep.lhs));
    if (rep.tau_below_a) margin = std::min(margin, Rational(rep.rhs_tau_below_a - rep.lhs));
    o.margin = static_cast<double>(margin);
    o.holds = rep.holds();
    o.equality = margin == 0;
    Digest d;
    d.add(static_cast<double>(a)).add(static_cast<double>(tau));
    for (const auto& v : f.values) d.add(static_cast<double>(v));
    for (const auto& v : f.breaks) d.add(static_cast<double>(v));
    o.digest = d.hex();
    return {o};
  }
  if (name == "mgf") {
    // A random finite law; C is the grid supremum of the premise ratio over t^2,
    // padded, and B is raised until C <= B.
    const int atoms = 1 + static_cast<int>(rng.below(6));
    std::vector<double> sample;
    for (int i = 0; i < atoms; ++i) {
      const double z = 3 * rng.uniform();
      const auto reps = 1 + rng.below(4);
      for (std::uint64_t r = 0; r < reps; ++r) sample.push_back(z);
    }
    const auto law = empirical_law(sample);
    double B = 1, C = 0;
    for (int pass = 0; pass < 20; ++pass) {
      C = 1e-3;
      for (int j = 1; j <= 2000; ++j) {
        const double t = j / (2000 * std::sqrt(B));
        C = std::max(C, -std::expm1(2 * law.log_mgf(t / 2) - law.log_mgf(t)) / (t * t));
      }
      C *= 1.05;
      if (C <= B) break;
      B = C;
    }
    const std::vector<double> lambdas{0.25, 0.5, 1, 2, 4};
    const auto rep = mgf_concentration_check(law, C, B, lambdas);
    Outcome o;
    o.holds = rep.premise_holds && rep.chain_holds;
    o.margin = INFINITY;
    for (const auto& pt : rep.grid) o.margin = std::min(o.margin, pt.psi_bound - pt.psi);
    o.digest = Digest().add(sample).hex();
    return {o};
  }
  if (name == "exhaustive") {
    const bool big = rng.below(2) == 1;
    const Region box = Region::box(Site{0, 0}, big ? Site{2, 1} : Site{1, 1});
    const double a = 1 + static_cast<double>(rng.below(4));
    const double b = a + 1 + static_cast<double>(rng.below(4));
    const double p = 0.1 + 0.8 * rng.uniform();
    const auto rep = fpp_exhaustive_check(box, Site{0, 0}, Site{big ? 2 : 1, 0},
                                          DistributionSpec{Bernoulli{a, b, p}});
    Outcome o = from(rep.efron_stein);
    const Outcome fs = from(rep.fs.fs);
    o.holds = o.holds && rep.fs.holds();
    o.margin = std::min(o.margin, fs.margin);
    return {o};
  }
  throw std::invalid_argument("unknown inequality suite '" + name + "'");
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"efron-stein", "falik-samorodnitsky", "entlow", "log-sobolev", "tensorization",
          "variational", "rossignol",           "mgf",    "exhaustive"};
}

std::vector<SuiteSummary> run_suite(const std::string& name, std::int64_t instances, std::uint64_t seed, int threads) {
  if (instances < 1) throw std::invalid_argument("suite needs at least one instance");
  std::vector<std::string> names;
  if (name == "all") {
    names = suite_names();
  } else {
    const auto known = suite_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw std::invalid_argument("unknown inequality suite '" + name + "'");
    names = {name};
  }
  std::vector<SuiteSummary> out;
  const int team = threads > 0 ? threads : omp_get_max_threads();
  for (const auto& n : names) {
    std::vector<std::vector<Outcome>> results(static_cast<std::size_t>(instances));
    std::uint64_t h = kSuiteKey;
    for (char c : n) h = mix64(h, static_cast<unsigned char>(c));
    const std::uint64_t key = mix64(seed, h);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(team)
    for (std::int64_t i = 0; i < instances; ++i) {
      try {
        results[static_cast<std::size_t>(i)] = one_instance(n, mix64(key, static_cast<std::uint64_t>(i)));
      } catch (...) {
#pragma omp critical(fpplab_suite_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    SuiteSummary s;
    s.check = n;
    s.instances = instances;
    s.min_margin = INFINITY;
    for (const auto& inst : results)
      for (const auto& o : inst) {
        s.violations += !o.holds;
        s.equalities += o.equality;
        s.vacuous += o.vacuous;
        if (o.margin < s.min_margin) {
          s.min_margin = o.margin;
          s.worst_digest = o.digest;
        }
      }
    out.push_back(s);
  }
  return out;
}

}  // namespace fpplab::ineq
