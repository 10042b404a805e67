#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fpplab/fpp.hpp"
#include "fpplab/rng.hpp"
#include "oracles.hpp"

using namespace fpplab;

namespace {

const Region kBox3 = Region::box(Site{0, 0}, Site{2, 2});

WeightField unit_field(const Region& r) {
  return WeightField::from_weights(r, std::vector<double>(static_cast<std::size_t>(r.num_edges()), 1.0));
}

PassageOptions fixed_window() {
  PassageOptions o;
  o.auto_grow = false;
  return o;
}

std::vector<std::int64_t> axis_segment(const Region& r, int n) {
  std::vector<std::int64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(r.edge_index({Site{i, 0}, 0}));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("unit weights give the straight segment") {
  const Region r = point_window(5, 2, 3);
  const auto res = passage_time(unit_field(r), Site{0, 0}, Site{5, 0}, fixed_window());
  CHECK(res.T == 5);
  CHECK(res.g_intersection == axis_segment(r, 5));
  CHECK(res.geodesic_dag == axis_segment(r, 5));
  CHECK(res.sample_path.size() == 6);
  CHECK_FALSE(res.boundary_contact);
  CHECK(res.d_src[static_cast<std::size_t>(r.site_index(Site{5, 0}))] == 5);
  CHECK(res.d_dst[static_cast<std::size_t>(r.site_index(Site{0, 0}))] == 5);
}

TEST_CASE("shortest path equals the self-avoiding path minimum on the 3x3 box") {
  for (const char* text : {"uniform:0,1", "bernoulli:1,2,0.5"}) {
    const auto spec = DistributionSpec::parse(text);
    for (std::uint64_t k = 0; k < 100; ++k) {
      const auto f = sample_field(spec, kBox3, mix64(11, k));
      const auto ref = oracle::self_avoiding_min(kBox3, f.weights(), Site{0, 0}, Site{2, 2});
      const auto res = passage_time(f, Site{0, 0}, Site{2, 2}, fixed_window());
      CHECK(std::abs(res.T - ref.T) <= 1e-12);
      CHECK(res.g_intersection == ref.intersection);
      const auto dag_count = static_cast<int>(res.geodesic_dag.size());
      if (spec.atomic()) continue;
      // Ties have probability zero for continuous weights.
      CHECK(ref.minimizers == 1);
      CHECK(dag_count + 1 == static_cast<int>(res.sample_path.size()));
    }
  }
}

TEST_CASE("path-count intersection equals removal") {
  const Region r = Region::box(Site{-1, -2}, Site{4, 2});
  for (const char* text : {"uniform:0,1", "bernoulli:1,2,0.5", "table:1,0.3,2,0.7,3,1", "bernoulli:0,1,0.3"}) {
    const auto spec = DistributionSpec::parse(text);
    for (std::uint64_t k = 0; k < 60; ++k) {
      const auto f = sample_field(spec, r, mix64(12, k));
      const auto res = passage_time(f, Site{0, 0}, Site{3, 1}, fixed_window());
      CHECK(res.g_intersection == intersection_by_removal(f, Site{0, 0}, Site{3, 1}));
      CHECK(std::includes(res.geodesic_dag.begin(), res.geodesic_dag.end(), res.g_intersection.begin(),
                          res.g_intersection.end()));
    }
  }
}

TEST_CASE("tied parallel corridors have an empty intersection") {
  const Region r = Region::box(Site{0, 0}, Site{2, 1});
  std::vector<double> w(static_cast<std::size_t>(r.num_edges()), 5.0);
  auto set = [&](EdgeId e, double v) { w[static_cast<std::size_t>(r.edge_index(e))] = v; };
  set({Site{0, 0}, 0}, 1);
  set({Site{1, 0}, 0}, 1);
  set({Site{0, 0}, 1}, 1);
  set({Site{0, 1}, 0}, 1);
  set({Site{1, 1}, 0}, 1);
  set({Site{2, 0}, 1}, 1);
  const auto f = WeightField::from_weights(r, w);
  const auto res = passage_time(f, Site{0, 0}, Site{2, 1}, fixed_window());
  CHECK(res.T == 3);
  CHECK(res.g_intersection.empty());
  CHECK(res.geodesic_dag.size() == 6);
}

TEST_CASE("geodesic dag criterion and path extraction") {
  const Region r = Region::box(Site{-2, -3}, Site{7, 3});
  const auto spec = DistributionSpec::parse("bernoulli:1,2,0.5");
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto f = sample_field(spec, r, mix64(13, k));
    const auto res = passage_time(f, Site{0, 0}, Site{5, 0}, fixed_window());
    const LatticeGraph g(r);
    std::vector<std::int64_t> expect;
    for (std::int64_t e = 0; e < r.num_edges(); ++e) {
      const auto u = static_cast<std::size_t>(g.tail(static_cast<std::int32_t>(e)));
      const auto v = static_cast<std::size_t>(g.head(static_cast<std::int32_t>(e)));
      const double via = std::min(res.d_src[u] + f.weight(e) + res.d_dst[v], res.d_src[v] + f.weight(e) + res.d_dst[u]);
      if (via == res.T) expect.push_back(e);
    }
    CHECK(res.geodesic_dag == expect);
    double len = 0;
    for (std::size_t i = 0; i + 1 < res.sample_path.size(); ++i) {
      const auto nb = neighbors(res.sample_path[i], r);
      const auto it = std::find_if(nb.begin(), nb.end(), [&](const auto& p) { return p.first == res.sample_path[i + 1]; });
      REQUIRE(it != nb.end());
      const auto e = r.edge_index(it->second);
      CHECK(std::binary_search(res.geodesic_dag.begin(), res.geodesic_dag.end(), e));
      len += f.weight(e);
    }
    CHECK(len == res.T);
  }
}

TEST_CASE("homogeneity, triangle inequality and monotonicity") {
  const Region r = Region::box(Site{-4, -4}, Site{8, 4});
  const auto spec = DistributionSpec::parse("uniform:0,1");
  CounterStream rng(404);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto f = sample_field(spec, r, mix64(14, k));
    const auto a = passage_time(f, Site{0, 0}, Site{4, 1}, fixed_window());
    const auto b = passage_time(f.scaled(2.5), Site{0, 0}, Site{4, 1}, fixed_window());
    CHECK(b.T == doctest::Approx(2.5 * a.T).epsilon(1e-13));
    CHECK(a.geodesic_dag == b.geodesic_dag);
    auto pick = [&] {
      return Site{static_cast<int>(rng.below(13)) - 4, static_cast<int>(rng.below(9)) - 4};
    };
    const Site x = pick(), y = pick(), z = pick();
    CHECK(passage_value(f, x, z) <= passage_value(f, x, y) + passage_value(f, y, z));
    const auto e = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(r.num_edges())));
    CHECK(passage_value(f.with_weight(e, f.weight(e) + 0.3), Site{0, 0}, Site{4, 1}) >= a.T);
  }
}

TEST_CASE("window grows while a geodesic touches the boundary") {
  const auto spec = DistributionSpec::parse("uniform:0,1");
  int grows = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto f = sample_field(spec, point_window(20, 2, 1), mix64(20, k));
    const auto res = passage_time(f, Site{0, 0}, Site{20, 0});
    grows += res.window_grows;
    CHECK_FALSE(res.boundary_contact);
    CHECK(res.window().lo()[1] <= -1);
    CHECK(passage_value(f.resample(res.window()), Site{0, 0}, Site{20, 0}) == res.T);
  }
  CHECK(grows > 0);
  // Contact is a heuristic, not a certificate; at the default margin the
  // answer agrees with a much larger window.
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto f = sample_field(spec, point_window(24, 2, 12), mix64(21, k));
    const auto big = sample_field(spec, point_window(24, 2, 48), mix64(21, k));
    CHECK(passage_time(f, Site{0, 0}, Site{24, 0}).T == passage_value(big, Site{0, 0}, Site{24, 0}));
  }
}

TEST_CASE("edge criticality") {
  const Region r = point_window(5, 2, 3);
  const auto unit = unit_field(r);
  const auto first = r.edge_index({Site{0, 0}, 0});
  const auto crit = edge_criticality(unit, first, Site{0, 0}, Site{5, 0}, fixed_window());
  // Kink of t -> T(t) located by a sweep.
  double kink = 0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.05 * i;
    const double T = passage_value(unit.with_weight(first, t), Site{0, 0}, Site{5, 0});
    if (T == 4 + t) kink = t;
  }
  CHECK(crit.D == 3);
  CHECK(kink == doctest::Approx(crit.D));

  const auto far = r.edge_index({Site{8, 2}, 1});
  CHECK(edge_criticality(unit, far, Site{0, 0}, Site{5, 0}, fixed_window()).D == 0);

  const Region box = Region::box(Site{-3, -3}, Site{7, 3});
  CounterStream rng(505);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto spec = DistributionSpec::parse(k % 2 ? "uniform:0,1" : "bernoulli:1,2,0.5");
    const auto f = sample_field(spec, box, mix64(15, k));
    const auto e = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(box.num_edges())));
    const auto c = edge_criticality(f, e, Site{0, 0}, Site{4, 0}, fixed_window());
    const double s = 2 * rng.uniform(), t = s + 2 * rng.uniform();
    const double Ts = passage_value(f.with_weight(e, s), Site{0, 0}, Site{4, 0});
    const double Tt = passage_value(f.with_weight(e, t), Site{0, 0}, Site{4, 0});
    CHECK(std::abs((Tt - Ts) - std::min(t - s, std::max(c.D - s, 0.0))) <= 1e-10);
    CHECK(c.passage_at(s) == doctest::Approx(Ts).epsilon(1e-12));
  }
}

TEST_CASE("single edge update equals recomputation") {
  const Region r = Region::box(Site{-3, -3}, Site{7, 3});
  const Site a{0, 0}, b{4, 1};
  const auto unit = unit_field(r);
  const auto base = passage_time(unit, a, b, fixed_window());
  const auto off = r.edge_index({Site{-3, -3}, 0});
  CHECK(single_edge_update(base, off, 9.0) == base.T);

  const auto spec = DistributionSpec::parse("uniform:0,1");
  const auto f = sample_field(spec, r, 71);
  const auto res = passage_time(f, a, b, fixed_window());
  std::int64_t heavy = res.g_intersection.front();
  for (auto e : res.g_intersection)
    if (f.weight(e) > f.weight(heavy)) heavy = e;
  const double delta = 0.5 * f.weight(heavy);
  CHECK(single_edge_update(res, heavy, f.weight(heavy) - delta) == doctest::Approx(res.T - delta).epsilon(1e-14));

  CounterStream rng(606);
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto fk = sample_field(k % 2 ? spec : DistributionSpec::parse("bernoulli:1,2,0.5"), r, mix64(16, k));
    const auto rk = passage_time(fk, a, b, fixed_window());
    std::int64_t e = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(r.num_edges())));
    if (k % 3 == 0) e = rk.geodesic_dag[rng.below(rk.geodesic_dag.size())];
    const double t = 2.5 * rng.uniform();
    CHECK(single_edge_update(rk, e, t) == passage_value(fk.with_weight(e, t), a, b));
  }
}

TEST_CASE("torus passage") {
  for (int n : {3, 5, 8}) {
    const auto res = torus_passage(unit_field(Region::torus(2, n)));
    CHECK(res.T == n);
    CHECK(res.g_intersection.empty());
    CHECK(res.sample_path.front() == res.sample_path.back());
  }
  const Region t3 = Region::torus(2, 3);
  const auto spec = DistributionSpec::parse("bernoulli:1,2,0.5");
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto f = sample_field(spec, t3, mix64(17, k));
    const auto ref = oracle::winding_cycle_min(t3, f.weights(), 12);
    const auto res = torus_passage(f);
    CHECK(res.T == ref.T);
    CHECK(res.g_intersection == ref.intersection);
    CHECK(res.g_intersection == torus_intersection_by_removal(f));
  }
  const Region t6 = Region::torus(2, 6);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto f = sample_field(DistributionSpec::parse("uniform:0,1"), t6, mix64(18, k));
    const auto base = torus_passage(f);
    CHECK(base.g_intersection == torus_intersection_by_removal(f));
    for (int c = 1; c < 6; ++c) {
      TorusOptions o;
      o.cut = c;
      CHECK(torus_passage(f, o).T == doctest::Approx(base.T).epsilon(1e-14));
    }
  }
}

TEST_CASE("averaged passage") {
  CHECK(fourth_root_ceil(16) == 2);
  CHECK(fourth_root_ceil(17) == 3);
  CHECK(fourth_root_ceil(1) == 1);
  const Region r = point_window(16, 2, 8);
  const auto fn = averaged_passage(unit_field(r), 16, fixed_window());
  CHECK(fn.m == 2);
  CHECK(fn.sources.size() == 13);
  CHECK(fn.F == 16);
  const auto spec = DistributionSpec::parse("uniform:0,1");
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto f = sample_field(spec, point_window(16, 2, 10), mix64(19, k));
    const auto avg = averaged_passage(f, 16, fixed_window());
    const auto zero = averaged_passage(f, 16, 0, fixed_window());
    const double T0 = passage_value(f, Site{0, 0}, Site{16, 0});
    CHECK(zero.F == T0);
    for (std::size_t i = 0; i < avg.sources.size(); ++i) {
      const Site z = avg.sources[i];
      CHECK(avg.terms[i] == passage_value(f, z, z + Site{16, 0}));
      CHECK(std::abs(T0 - avg.terms[i]) <= passage_value(f, Site{0, 0}, z) + passage_value(f, Site{16, 0}, z + Site{16, 0}) + 1e-12);
    }
  }
}

TEST_CASE("replacement paths equal per-edge deletion") {
  const Region r = Region::box(Site{-4, -4}, Site{10, 4});
  for (const char* text : {"uniform:0,1", "bernoulli:1,2,0.5", "bernoulli:0,1,0.2"}) {
    const auto spec = DistributionSpec::parse(text);
    for (std::uint64_t k = 0; k < 25; ++k) {
      const auto f = sample_field(spec, r, mix64(22, k));
      const auto res = passage_time(f, Site{0, 0}, Site{6, 1}, fixed_window());
      const auto times = path_removal_times(res);
      REQUIRE(times.size() + 1 == res.sample_path.size());
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto nb = neighbors(res.sample_path[i], r);
        const auto it = std::find_if(nb.begin(), nb.end(), [&](const auto& p) { return p.first == res.sample_path[i + 1]; });
        const auto e = r.edge_index(it->second);
        const auto crit = edge_criticality(f, e, Site{0, 0}, Site{6, 1}, fixed_window());
        CHECK(times[i] == doctest::Approx(crit.T_without).epsilon(1e-13));
        const bool in_g = std::binary_search(res.g_intersection.begin(), res.g_intersection.end(), e);
        CHECK(in_g == (times[i] > res.T));
      }
    }
  }
}
