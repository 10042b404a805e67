#include "fpplab/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "fpplab/rng.hpp"

namespace fpplab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  return v;
}

std::vector<double> split_params(std::string_view s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    out.push_back(parse_double(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void expect_count(const std::string& name, const std::vector<double>& p, std::size_t n) {
  if (p.size() != n)
    throw std::invalid_argument(name + " takes " + std::to_string(n) + " parameter(s), got " +
                                std::to_string(p.size()));
}

// Smallest k >= 0 with 1 - q^(k+1) >= y.
double geometric_inverse(double q, double y) {
  if (q <= 0) return 0;
  double k = std::ceil(std::log1p(-y) / std::log(q)) - 1;
  if (k < 0) k = 0;
  while (k > 0 && 1 - std::pow(q, k) >= y) k -= 1;
  while (1 - std::pow(q, k + 1) < y) k += 1;
  return k;
}

}  // namespace

DistributionSpec::DistributionSpec(Variant v) : v_(std::move(v)) {
  validate();
  infimum_ = std::visit(Overloaded{
                            [](const Bernoulli& b) { return b.p > 0 ? b.a : b.b; },
                            [](const Uniform& u) { return u.lo; },
                            [](const Exponential&) { return 0.0; },
                            [](const Geometric&) { return 0.0; },
                            [](const TableCDF& t) { return t.points.front().first; },
                        },
                        v_);
}

void DistributionSpec::validate() const {
  std::visit(Overloaded{
                 [](const Bernoulli& b) {
                   if (!(b.a >= 0 && b.b >= b.a && std::isfinite(b.b)))
                     throw std::invalid_argument("bernoulli needs 0 <= a <= b");
                   if (!(b.p >= 0 && b.p <= 1)) throw std::invalid_argument("bernoulli p must lie in [0, 1]");
                 },
                 [](const Uniform& u) {
                   if (!(u.lo >= 0 && u.hi >= u.lo && std::isfinite(u.hi)))
                     throw std::invalid_argument("uniform needs 0 <= lo <= hi");
                 },
                 [](const Exponential& e) {
                   if (!(e.rate > 0 && std::isfinite(e.rate))) throw std::invalid_argument("exponential rate must be positive");
                 },
                 [](const Geometric& g) {
                   if (!(g.q >= 0 && g.q < 1)) throw std::invalid_argument("geometric q must lie in [0, 1)");
                 },
                 [](const TableCDF& t) {
                   if (t.points.empty()) throw std::invalid_argument("table needs at least one breakpoint");
                   double px = -1, pf = 0;
                   for (auto [x, f] : t.points) {
                     if (!(x >= 0 && std::isfinite(x))) throw std::invalid_argument("table breakpoints must be finite and >= 0");
                     if (!(x > px)) throw std::invalid_argument("table breakpoints must increase");
                     if (!(f > pf && f <= 1)) throw std::invalid_argument("table CDF values must increase within (0, 1]");
                     px = x;
                     pf = f;
                   }
                   if (pf != 1.0) throw std::invalid_argument("table CDF must end at 1");
                 },
             },
             v_);
}

DistributionSpec DistributionSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("distribution '" + text + "' lacks ':'");
  std::string name = text.substr(0, colon);
  while (!name.empty() && name.back() == ' ') name.pop_back();
  while (!name.empty() && name.front() == ' ') name.erase(name.begin());
  const auto p = split_params(std::string_view(text).substr(colon + 1));
  if (name == "bernoulli") {
    expect_count(name, p, 3);
    return DistributionSpec(Bernoulli{p[0], p[1], p[2]});
  }
  if (name == "uniform") {
    expect_count(name, p, 2);
    return DistributionSpec(Uniform{p[0], p[1]});
  }
  if (name == "exponential") {
    expect_count(name, p, 1);
    return DistributionSpec(Exponential{p[0]});
  }
  if (name == "geometric") {
    expect_count(name, p, 1);
    return DistributionSpec(Geometric{p[0]});
  }
  if (name == "point") {
    expect_count(name, p, 1);
    return DistributionSpec(TableCDF{{{p[0], 1.0}}});
  }
  if (name == "table") {
    if (p.empty() || p.size() % 2 != 0) throw std::invalid_argument("table takes pairs x,F");
    TableCDF t;
    for (std::size_t i = 0; i < p.size(); i += 2) t.points.emplace_back(p[i], p[i + 1]);
    return DistributionSpec(std::move(t));
  }
  throw std::invalid_argument("unknown distribution '" + name + "'");
}

std::string DistributionSpec::to_string() const {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) {
                          return "bernoulli:" + format_double(b.a) + "," + format_double(b.b) + "," + format_double(b.p);
                        },
                        [](const Uniform& u) { return "uniform:" + format_double(u.lo) + "," + format_double(u.hi); },
                        [](const Exponential& e) { return "exponential:" + format_double(e.rate); },
                        [](const Geometric& g) { return "geometric:" + format_double(g.q); },
                        [](const TableCDF& t) {
                          std::string s = "table:";
                          for (std::size_t i = 0; i < t.points.size(); ++i) {
                            if (i) s += ',';
                            s += format_double(t.points[i].first) + "," + format_double(t.points[i].second);
                          }
                          return s;
                        },
                    },
                    v_);
}

bool operator==(const DistributionSpec& a, const DistributionSpec& b) { return a.to_string() == b.to_string(); }

double DistributionSpec::cdf(double x) const {
  return std::visit(Overloaded{
                        [x](const Bernoulli& b) { return x < b.a ? 0.0 : (x < b.b ? b.p : 1.0); },
                        [x](const Uniform& u) {
                          if (x < u.lo) return 0.0;
                          if (x >= u.hi) return 1.0;
                          return (x - u.lo) / (u.hi - u.lo);
                        },
                        [x](const Exponential& e) { return x < 0 ? 0.0 : -std::expm1(-e.rate * x); },
                        [x](const Geometric& g) { return x < 0 ? 0.0 : 1.0 - std::pow(g.q, std::floor(x) + 1); },
                        [x](const TableCDF& t) {
                          double f = 0;
                          for (auto [bx, bf] : t.points) {
                            if (bx > x) break;
                            f = bf;
                          }
                          return f;
                        },
                    },
                    v_);
}

double DistributionSpec::cdf_below(double x) const {
  return std::visit(Overloaded{
                        [x](const Bernoulli& b) { return x <= b.a ? 0.0 : (x <= b.b ? b.p : 1.0); },
                        [this, x](const Uniform& u) { return u.lo == u.hi ? (x <= u.lo ? 0.0 : 1.0) : cdf(x); },
                        [this, x](const Exponential&) { return cdf(x); },
                        [x](const Geometric& g) { return x <= 0 ? 0.0 : 1.0 - std::pow(g.q, std::ceil(x)); },
                        [x](const TableCDF& t) {
                          double f = 0;
                          for (auto [bx, bf] : t.points) {
                            if (bx >= x) break;
                            f = bf;
                          }
                          return f;
                        },
                    },
                    v_);
}

double DistributionSpec::inverse_cdf(double y) const {
  if (!(y > 0 && y < 1)) throw std::domain_error("inverse_cdf needs 0 < y < 1");
  return std::visit(Overloaded{
                        [y](const Bernoulli& b) { return y <= b.p ? b.a : b.b; },
                        [y](const Uniform& u) { return u.lo + y * (u.hi - u.lo); },
                        [y](const Exponential& e) { return -std::log1p(-y) / e.rate; },
                        [y](const Geometric& g) { return geometric_inverse(g.q, y); },
                        [y](const TableCDF& t) {
                          auto it = std::lower_bound(t.points.begin(), t.points.end(), y,
                                                     [](const auto& pt, double v) { return pt.second < v; });
                          return it == t.points.end() ? t.points.back().first : it->first;
                        },
                    },
                    v_);
}

double DistributionSpec::mean() const {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) { return b.p * b.a + (1 - b.p) * b.b; },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const Exponential& e) { return 1 / e.rate; },
                        [](const Geometric& g) { return g.q / (1 - g.q); },
                        [](const TableCDF& t) {
                          double m = 0, prev = 0;
                          for (auto [x, f] : t.points) {
                            m += x * (f - prev);
                            prev = f;
                          }
                          return m;
                        },
                    },
                    v_);
}

double DistributionSpec::second_moment() const {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) { return b.p * b.a * b.a + (1 - b.p) * b.b * b.b; },
                        [](const Uniform& u) { return (u.lo * u.lo + u.lo * u.hi + u.hi * u.hi) / 3; },
                        [](const Exponential& e) { return 2 / (e.rate * e.rate); },
                        [](const Geometric& g) { return g.q * (1 + g.q) / ((1 - g.q) * (1 - g.q)); },
                        [](const TableCDF& t) {
                          double m = 0, prev = 0;
                          for (auto [x, f] : t.points) {
                            m += x * x * (f - prev);
                            prev = f;
                          }
                          return m;
                        },
                    },
                    v_);
}

std::vector<std::pair<double, double>> DistributionSpec::atoms() const {
  std::vector<std::pair<double, double>> out;
  std::visit(Overloaded{
                 [&](const Bernoulli& b) {
                   if (b.a == b.b) {
                     out.emplace_back(b.a, 1.0);
                     return;
                   }
                   if (b.p > 0) out.emplace_back(b.a, b.p);
                   if (b.p < 1) out.emplace_back(b.b, 1 - b.p);
                 },
                 [&](const Uniform& u) {
                   if (u.lo == u.hi) out.emplace_back(u.lo, 1.0);
                 },
                 [](const Exponential&) {},
                 [](const Geometric&) {},
                 [&](const TableCDF& t) {
                   double prev = 0;
                   for (auto [x, f] : t.points) {
                     out.emplace_back(x, f - prev);
                     prev = f;
                   }
                 },
             },
             v_);
  return out;
}

bool DistributionSpec::atomic() const { return std::holds_alternative<Geometric>(v_) || !atoms().empty(); }

double critical_probability(int dim) {
  switch (dim) {
    case 2:
      return 0.5;
    case 3:
      return 0.2488126;
    case 4:
      return 0.1601314;
    default:
      throw std::invalid_argument("no p_c for this dimension");
  }
}

std::optional<std::string> check_fpp_admissible(const DistributionSpec& spec, int dim) {
  const double pc = critical_probability(dim);
  const double zero_mass = spec.atom_at_zero();
  if (zero_mass >= pc)
    throw std::invalid_argument("atom at 0 has mass " + format_double(zero_mass) + " >= p_c(" +
                                std::to_string(dim) + ") = " + format_double(pc));
  if (dim >= 3 && zero_mass > 0)
    return "p_c(" + std::to_string(dim) + ") is a numerical estimate; the zero-atom check is approximate";
  return std::nullopt;
}

std::uint64_t lattice_edge_key(const EdgeId& e) {
  std::uint64_t key = 0;
  for (int i = 0; i < e.base.dim; ++i) {
    const int c = e.base[i];
    if (c <= -8192 || c >= 8192) throw std::out_of_range("edge coordinate too large for key");
    const auto zz = static_cast<std::uint64_t>(c >= 0 ? 2 * c : -2 * c - 1);
    key |= zz << (14 * i);
  }
  key |= static_cast<std::uint64_t>(e.axis) << 56;
  key |= static_cast<std::uint64_t>(e.base.dim) << 58;
  return key;
}

std::uint64_t edge_draw(std::uint64_t seed, const EdgeId& e) { return mix64(seed, lattice_edge_key(e)); }

WeightField WeightField::sample(const DistributionSpec& spec, const Region& region, std::uint64_t seed,
                                bool for_fpp, int depth) {
  if (depth < 1 || depth > kDyadicDepth) throw std::invalid_argument("dyadic depth must lie in [1, 53]");
  if (for_fpp) check_fpp_admissible(spec, region.dim());
  WeightField f;
  f.region_ = region;
  f.seed_ = seed;
  f.spec_ = spec;
  f.sampled_ = true;
  f.depth_ = depth;
  const auto ne = region.num_edges();
  f.weights_.resize(static_cast<std::size_t>(ne));
  const double cell = std::ldexp(1.0, -depth);
  for (std::int64_t i = 0; i < ne; ++i) {
    const std::uint64_t k = edge_draw(seed, region.edge_at(i)) >> (64 - depth);
    f.weights_[static_cast<std::size_t>(i)] = spec.inverse_cdf((static_cast<double>(k) + 0.5) * cell);
  }
  f.detect_scale();
  return f;
}

WeightField WeightField::from_weights(const Region& region, std::vector<double> weights,
                                      std::optional<DistributionSpec> spec) {
  if (static_cast<std::int64_t>(weights.size()) != region.num_edges())
    throw std::invalid_argument("weight count does not match region edge count");
  for (double w : weights)
    if (!(w >= 0 && std::isfinite(w))) throw std::invalid_argument("weights must be finite and nonnegative");
  WeightField f;
  f.region_ = region;
  f.weights_ = std::move(weights);
  f.spec_ = std::move(spec);
  f.detect_scale();
  return f;
}

WeightField WeightField::resample(const Region& region) const {
  if (!sampled_) throw std::logic_error("field was not sampled and cannot be resampled");
  return sample(*spec_, region, seed_, false, depth_);
}

WeightField WeightField::with_weight(std::int64_t edge, double value) const {
  if (!(value >= 0 && std::isfinite(value))) throw std::invalid_argument("weights must be finite and nonnegative");
  WeightField f = *this;
  f.weights_.at(static_cast<std::size_t>(edge)) = value;
  f.sampled_ = false;
  f.detect_scale();
  return f;
}

WeightField WeightField::scaled(double factor) const {
  if (!(factor > 0)) throw std::invalid_argument("scale factor must be positive");
  WeightField f = *this;
  for (double& w : f.weights_) w *= factor;
  f.sampled_ = false;
  f.spec_.reset();
  f.detect_scale();
  return f;
}

void WeightField::detect_scale() {
  integer_scale_ = 0;
  double max_w = 0;
  for (double w : weights_) max_w = std::max(max_w, w);
  const double budget = 0x1.0p62 / std::max<double>(1.0, static_cast<double>(weights_.size()));
  auto fits = [&](double s, bool exact) {
    if (max_w * s > budget) return false;
    for (double w : weights_) {
      const double v = w * s;
      const double r = std::nearbyint(v);
      // Decimal scales must reproduce the stored double exactly from the integer.
      if (exact ? v != r : r / s != w) return false;
    }
    return true;
  };
  for (int k = 0; k <= 30; ++k) {
    if (fits(std::ldexp(1.0, k), true)) {
      integer_scale_ = std::int64_t{1} << k;
      return;
    }
  }
  double s = 1;
  for (int k = 1; k <= 9; ++k) {
    s *= 10;
    if (fits(s, false)) {
      integer_scale_ = static_cast<std::int64_t>(s);
      return;
    }
  }
}

WeightField sample_field(const DistributionSpec& spec, const Region& region, std::uint64_t seed) {
  return WeightField::sample(spec, region, seed, true);
}

DyadicCode::DyadicCode(std::int64_t num_edges, int depth) : depth_(depth) {
  if (depth < 1 || depth > 64) throw std::invalid_argument("dyadic depth must lie in [1, 64]");
  mantissa_.assign(static_cast<std::size_t>(num_edges), 0);
}

DyadicCode DyadicCode::encode(const Region& region, std::uint64_t seed, int depth) {
  DyadicCode code(region.num_edges(), depth);
  for (std::int64_t i = 0; i < region.num_edges(); ++i)
    code.mantissa_[static_cast<std::size_t>(i)] = edge_draw(seed, region.edge_at(i)) >> (64 - depth);
  return code;
}

bool DyadicCode::bit(std::int64_t edge, int j) const {
  if (j < 1 || j > depth_) throw std::out_of_range("dyadic bit index out of range");
  return (mantissa_.at(static_cast<std::size_t>(edge)) >> (depth_ - j)) & 1U;
}

void DyadicCode::set_bit(std::int64_t edge, int j, bool value) {
  if (j < 1 || j > depth_) throw std::out_of_range("dyadic bit index out of range");
  auto& m = mantissa_.at(static_cast<std::size_t>(edge));
  const std::uint64_t mask = std::uint64_t{1} << (depth_ - j);
  m = value ? (m | mask) : (m & ~mask);
}

std::vector<std::uint8_t> DyadicCode::bits(std::int64_t edge) const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(depth_));
  for (int j = 1; j <= depth_; ++j) out[static_cast<std::size_t>(j - 1)] = bit(edge, j) ? 1 : 0;
  return out;
}

double DyadicCode::value(std::int64_t edge) const {
  return std::ldexp(static_cast<double>(mantissa_.at(static_cast<std::size_t>(edge))), -depth_);
}

double dyadic_value(std::span<const std::uint8_t> bits) {
  double u = 0;
  for (std::size_t j = bits.size(); j-- > 0;) u = 0.5 * (u + (bits[j] ? 1.0 : 0.0));
  return u;
}

double dyadic_weight(const DistributionSpec& spec, double u) {
  if (u <= 0) return spec.infimum();
  return spec.inverse_cdf(u);
}

double dyadic_flip(const DyadicCode& code, const DistributionSpec& spec, std::int64_t edge, int j,
                   FlipDirection direction) {
  DyadicCode flipped = code;
  flipped.set_bit(edge, j, direction == FlipDirection::Up);
  return dyadic_weight(spec, flipped.value(edge));
}

double log_cdf_weight(const DistributionSpec& spec, double t) {
  const double f = spec.cdf(t);
  if (!(f > 0)) throw std::domain_error("F(t) = 0: t lies below the support");
  return 1 - std::log(f);
}

}  // namespace fpplab
