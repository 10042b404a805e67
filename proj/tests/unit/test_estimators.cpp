#include <cmath>

#include "doctest.h"
#include "fpplab/estimators.hpp"
#include "fpplab/rng.hpp"

using namespace fpplab;

namespace {

SweepConfig point_config(const std::string& dist, std::vector<int> ns, int replicas) {
  SweepConfig c;
  c.spec = DistributionSpec::parse(dist);
  c.n_list = std::move(ns);
  c.replicas = replicas;
  return c;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_record(const ReplicaRecord& a, const ReplicaRecord& b) {
  bool ok = a.n == b.n && a.replica == b.replica && same(a.T, b.T) && same(a.F_n, b.F_n) &&
            a.g_dag_size == b.g_dag_size && a.g_int_size == b.g_int_size && a.geo_len == b.geo_len &&
            same(a.geo_diam, b.geo_diam) && same(a.transverse_dev, b.transverse_dev) && same(a.Y_n, b.Y_n) &&
            a.window_grows == b.window_grows && a.boundary_contact == b.boundary_contact &&
            same(a.es_bound, b.es_bound) && same(a.es_relaxation, b.es_relaxation) && a.g_edges == b.g_edges;
  for (std::size_t k = 0; k < 3; ++k) ok = ok && same(a.window_counts[k], b.window_counts[k]);
  return ok;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = point_config("uniform:0,1", {4, 8}, 10);
  CHECK_NOTHROW(c.validate());
  c.n_list = {8, 4};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n_list = {4, 8};
  c.replicas = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.replicas = 10;
  c.spec = DistributionSpec::parse("bernoulli:0,1,0.6");
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.spec = DistributionSpec::parse("uniform:0,1");
  c.model = Model::Lpp;
  c.d = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(parse_model(to_string(Model::FppTorus)) == Model::FppTorus);
  CHECK_THROWS_AS(parse_model("fpp"), std::invalid_argument);
}

TEST_CASE("unit weights: T = n and G is the segment") {
  auto c = point_config("point:1", {4, 9}, 3);
  c.fn = true;
  c.efron_stein = true;
  c.es_resamples = 0;
  for (const auto& r : run_sweep(c, 2)) {
    CHECK(r.T == r.n);
    CHECK(r.F_n == r.n);
    CHECK(r.g_int_size == r.n);
    CHECK(r.g_dag_size == r.n);
    CHECK(r.Y_n == r.n);
    CHECK(r.es_bound == 0);
    CHECK(r.transverse_dev == 0);
    CHECK(r.geo_diam == r.n);
  }
}

TEST_CASE("window counts on a straight geodesic") {
  auto c = point_config("point:1", {32}, 2);
  const auto recs = run_sweep_serial(c);
  for (const auto& r : recs)
    for (std::size_t k = 0; k < kWindowRadii.size(); ++k) CHECK(r.window_counts[k] == 2 * kWindowRadii[k]);
  for (const auto& row : geodesic_window_stats(recs)) CHECK(row.ratio == 1);
}

TEST_CASE("parallel sweep reproduces the serial reference") {
  auto c = point_config("uniform:0,1", {6, 12}, 12);
  c.fn = true;
  c.efron_stein = true;
  const auto ref = run_sweep_serial(c);
  for (int threads : {1, 3, 8}) {
    const auto par = run_sweep(c, threads);
    REQUIRE(par.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(same_record(par[i], ref[i]));
  }
  SweepConfig t;
  t.model = Model::FppTorus;
  t.spec = DistributionSpec::parse("bernoulli:1,2,0.5");
  t.n_list = {4, 6};
  t.replicas = 10;
  const auto tref = run_sweep_serial(t);
  const auto tpar = run_sweep(t, 4);
  for (std::size_t i = 0; i < tref.size(); ++i) CHECK(same_record(tpar[i], tref[i]));
}

TEST_CASE("records stay consistent") {
  auto c = point_config("bernoulli:1,2,0.5", {8, 16}, 20);
  for (const auto& r : run_sweep(c)) {
    CHECK(r.g_int_size <= r.g_dag_size);
    CHECK(r.geo_len >= r.n);
    CHECK(r.Y_n >= static_cast<double>(r.g_int_size));
    CHECK(r.T >= r.n);
    CHECK(r.T <= 2 * r.n);
    CHECK(r.T / r.geo_len >= 1);
    for (std::size_t k = 0; k < 3; ++k) CHECK(r.window_counts[k] <= 2 * kWindowRadii[k] * 2);
  }
}

TEST_CASE("exact Efron-Stein estimate on the four-edge box") {
  // Enumerate all 16 configurations; the exact bound is the average of the
  // per-configuration atom expectations, and each of those is checked against
  // a brute-force recompute.
  const Region box = Region::box(Site{0, 0}, Site{1, 1});
  const auto spec = DistributionSpec::parse("bernoulli:1,2,0.5");
  PassageOptions o;
  o.auto_grow = false;
  const Site src{0, 0}, dst{1, 0};
  double avg = 0, var_sum = 0, mean = 0;
  std::vector<double> Ts;
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<double> w(4);
    for (int e = 0; e < 4; ++e) w[static_cast<std::size_t>(e)] = (mask >> e) & 1 ? 2.0 : 1.0;
    const auto field = WeightField::from_weights(box, w);
    const auto res = passage_time(field, src, dst, o);
    double brute = 0;
    for (int e = 0; e < 4; ++e)
      for (double t : {1.0, 2.0}) {
        const double diff = passage_value(field.with_weight(e, t), src, dst) - res.T;
        brute += 0.5 * 0.5 * diff * diff;
      }
    const auto est = efron_stein_bound(res, spec, 0, 1);
    CHECK(est.bound == doctest::Approx(brute).epsilon(1e-14));
    avg += est.bound / 16;
    Ts.push_back(res.T);
  }
  for (double t : Ts) mean += t / 16;
  for (double t : Ts) var_sum += (t - mean) * (t - mean) / 16;
  CHECK(avg >= var_sum);
}

TEST_CASE("Monte Carlo Efron-Stein estimate converges to the exact one") {
  const auto spec = DistributionSpec::parse("bernoulli:1,2,0.5");
  const auto field = WeightField::sample(spec, point_window(6, 2, 3), 4);
  const auto res = passage_time(field, Site{0, 0}, Site{6, 0});
  const double exact = efron_stein_bound(res, spec, 0, 0).bound;
  const double mc = efron_stein_bound(res, spec, 20000, 9).bound;
  CHECK(mc == doctest::Approx(exact).epsilon(0.03));
}

TEST_CASE("influence map of unit weights on the torus is empty") {
  SweepConfig t;
  t.model = Model::FppTorus;
  t.spec = DistributionSpec::parse("point:1");
  t.n_list = {5};
  t.replicas = 4;
  const auto map = influence_map(run_sweep(t), 5, 2, 19);
  CHECK(map.max_freq == 0);
  CHECK(map.mean_g == 0);
}

TEST_CASE("influence frequencies sum to the mean intersection size") {
  SweepConfig t;
  t.model = Model::FppTorus;
  t.spec = DistributionSpec::parse("bernoulli:1,2,0.5");
  t.n_list = {6};
  t.replicas = 200;
  const auto recs = run_sweep(t);
  const auto map = influence_map(recs, 6, 2, 49);
  double s = 0;
  for (double f : map.freq) s += f;
  CHECK(s == doctest::Approx(map.mean_g));
  REQUIRE(map.axes.size() == 2);
  for (const auto& a : map.axes) {
    CHECK(a.p_asymptotic >= 0);
    CHECK(a.p_randomization > 0);
  }
}

TEST_CASE("sublinearity profile on synthetic variances") {
  std::vector<SizeSummary> rows;
  for (int n : {16, 32, 64, 128}) {
    SizeSummary s;
    s.n = n;
    s.summary.variance = n / std::log(static_cast<double>(n));
    s.summary.variance_ci = {s.summary.variance * 0.9, s.summary.variance * 1.1};
    rows.push_back(s);
  }
  const auto p = sublinearity_profile(rows);
  for (const auto& r : p.rows) CHECK(r.var_log_over_n == doctest::Approx(1.0));
  CHECK(p.var_over_n_nonincreasing);
}

TEST_CASE("tail profile") {
  std::vector<double> x;
  CounterStream rng(8);
  const int n = 64;
  const double sd = std::sqrt(n / std::log(n));
  for (int i = 0; i < 20000; ++i) {
    const double u1 = rng.uniform(), u2 = rng.uniform();
    x.push_back(sd * std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2));
  }
  const auto p = tail_profile(x, n);
  REQUIRE(p.rows.size() >= 5);
  CHECK(p.rows[0].p_lower == doctest::Approx(0.5).epsilon(0.03));
  // Standard normal tail at 2.
  CHECK(p.rows[4].p_lower == doctest::Approx(0.02275).epsilon(0.2));
  CHECK(p.decreasing);
  const std::vector<double> few(10, 1.0);
  CHECK_THROWS_AS(tail_profile(few, n), std::invalid_argument);
}

TEST_CASE("averaged passage with a trivial ball equals T") {
  auto c = point_config("uniform:0,1", {8, 16}, 5);
  const auto recs = run_sweep(c);
  for (const auto& r : recs) {
    const auto field = WeightField::sample(c.spec, sweep_window(c, r.n), replica_seed(c.seed, r.n, r.replica));
    PassageOptions o;
    CHECK(averaged_passage(field, r.n, 0, o).F == r.T);
  }
  std::vector<ReplicaRecord> with_f = recs;
  for (auto& r : with_f) r.F_n = r.T;
  for (const auto& row : compare_fn_variance(with_f).rows) CHECK(row.diff == 0);
}

TEST_CASE("speed and animal weights for unit weights") {
  auto c = point_config("point:1", {4, 8, 16}, 2);
  const auto recs = run_sweep(c);
  for (const auto& row : geodesic_speed_stats(recs).rows) CHECK(row.min_ratio == 1);
  const auto a = animal_weight_stats(recs);
  CHECK(a.bounded_within_3);
  for (const auto& row : a.rows) CHECK(row.mean_y_over_n == 1);
}

TEST_CASE("summary seeds depend on column and n") {
  CHECK(summary_seed(8, "T") != summary_seed(16, "T"));
  CHECK(summary_seed(8, "T") != summary_seed(8, "F_n"));
}
