#include <algorithm>
#include <bit>
#include <cmath>

#include "doctest.h"
#include "fpplab/lpp.hpp"
#include "fpplab/rng.hpp"

using namespace fpplab;

namespace {

// Maximum over all up-right paths, by enumerating the positions of the i-steps.
double brute_force(const LppGrid& g) {
  const int n = g.n;
  double best = -INFINITY;
  for (std::uint32_t mask = 0; mask < (1u << (2 * n)); ++mask) {
    if (std::popcount(mask) != n) continue;
    int i = 0, j = 0;
    double s = g.at(0, 0);
    for (int k = 0; k < 2 * n; ++k) {
      if ((mask >> k) & 1) ++i;
      else ++j;
      s += g.at(i, j);
    }
    best = std::max(best, s);
  }
  return best;
}

LppGrid random_int_grid(int n, std::uint64_t seed) {
  CounterStream rng(seed);
  std::vector<double> w(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (double& x : w) x = static_cast<double>(rng.next() % 10);
  return LppGrid::from_weights(n, std::move(w));
}

}  // namespace

TEST_CASE("unit weights visit 2n+1 vertices") {
  for (int n : {1, 3, 10}) {
    const auto g = LppGrid::from_weights(n, std::vector<double>(static_cast<std::size_t>((n + 1) * (n + 1)), 1.0));
    const auto r = last_passage(g);
    CHECK(r.T == 2 * n + 1);
    CHECK(r.path.size() == static_cast<std::size_t>(2 * n + 1));
    CHECK(last_passage_value(g) == 2 * n + 1);
  }
}

TEST_CASE("two-path instance") {
  LppGrid g = LppGrid::from_weights(1, {0, 0, 0, 0});
  g.at(0, 0) = 1;
  g.at(1, 0) = 3;
  g.at(0, 1) = 2;
  g.at(1, 1) = 4;
  const auto r = last_passage(g);
  CHECK(r.T == 8);
  const std::vector<std::pair<int, int>> want{{0, 0}, {1, 0}, {1, 1}};
  CHECK(r.path == want);
}

TEST_CASE("ties prefer the (i-1, j) predecessor") {
  const auto g = LppGrid::from_weights(1, {1, 1, 1, 1});
  const std::vector<std::pair<int, int>> want{{0, 0}, {0, 1}, {1, 1}};
  CHECK(last_passage(g).path == want);
}

TEST_CASE("dynamic program matches path enumeration") {
  for (int n = 1; n <= 6; ++n)
    for (std::uint64_t s = 0; s < (n == 4 ? 50u : 10u); ++s) {
      const auto g = random_int_grid(n, mix64(n, s));
      const auto r = last_passage(g);
      CHECK(r.T == brute_force(g));
      CHECK(last_passage_value(g) == r.T);
      double along = 0;
      for (auto [i, j] : r.path) along += g.at(i, j);
      CHECK(along == r.T);
    }
}

TEST_CASE("raising a vertex weight never lowers T") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto g = random_int_grid(5, s);
    const double T = last_passage_value(g);
    CounterStream rng(s + 1000);
    const int i = static_cast<int>(rng.next() % 6), j = static_cast<int>(rng.next() % 6);
    g.at(i, j) += 1 + static_cast<double>(rng.next() % 5);
    CHECK(last_passage_value(g) >= T);
  }
}

TEST_CASE("streamed sampling matches the stored grid") {
  const auto spec = default_lpp_spec();
  for (int n : {1, 7, 40}) {
    const auto g = sample_lpp(spec, n, 99);
    CHECK(last_passage_sampled(spec, n, 99) == last_passage_value(g));
    CHECK(g.at(3 % (n + 1), 0) == lpp_vertex_weight(spec, 99, 3 % (n + 1), 0));
  }
}

TEST_CASE("geometric weights have mean one and the right atoms") {
  const auto spec = default_lpp_spec();
  const int N = 200000;
  double sum = 0;
  int zeros = 0, ones = 0;
  for (int k = 0; k < N; ++k) {
    const double w = lpp_vertex_weight(spec, 5, k / 1000, k % 1000);
    CHECK(w == std::floor(w));
    sum += w;
    zeros += (w == 0);
    ones += (w == 1);
  }
  CHECK(sum / N == doctest::Approx(1.0).epsilon(0.01));
  CHECK(zeros / double(N) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(ones / double(N) == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("fast geometric inverse agrees with the generic law") {
  // Same uniform pushed through Geometric{0.5} and through an equivalent table law.
  const DistributionSpec geo{Geometric{0.5}};
  TableCDF t;
  double F = 0;
  for (int k = 0; k < 53; ++k) {
    F += std::ldexp(1.0, -(k + 1));
    t.points.emplace_back(k, k == 52 ? 1.0 : F);
  }
  const DistributionSpec table{t};
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) CHECK(lpp_vertex_weight(geo, 17, i, j) == lpp_vertex_weight(table, 17, i, j));
}

TEST_CASE("rescaled statistic") {
  CHECK(rescaled_statistic(4.0 * 1000, 1000, 4.0) == 0);
  CHECK(rescaled_statistic(4100, 1000, 4.0) == doctest::Approx(100 / (std::cbrt(16.0) * 10)));
  CHECK(kJohanssonScale == doctest::Approx(std::pow(2.0, 4.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("center fit recovers an exact finite-size law") {
  const std::vector<int> ns{250, 500, 1000, 2000};
  std::vector<double> means;
  for (int n : ns) means.push_back(3.0 * n - 1.7 * std::pow(n, 1.0 / 3.0));
  CHECK(fit_lpp_center(ns, means) == doctest::Approx(3.0).epsilon(1e-12));
}
