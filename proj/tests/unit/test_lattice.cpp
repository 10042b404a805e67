#include <set>
#include <stdexcept>

#include "doctest.h"
#include "fpplab/lattice.hpp"

using namespace fpplab;

namespace {

Site filled(int d, int v) {
  Site s = Site::origin(d);
  for (int i = 0; i < d; ++i) s[i] = v;
  return s;
}

std::vector<Region> region_grid() {
  std::vector<Region> out;
  for (int d = 2; d <= 4; ++d) {
    for (int side : {3, 4}) out.push_back(Region::torus(d, side));
    out.push_back(Region::box(filled(d, -1), filled(d, 2)));
    out.push_back(Region::cylinder(d, 3, -2, 4));
  }
  out.push_back(Region::box(Site{0, 0}, Site{0, 0}));
  out.push_back(Region::box(Site{-3, 1}, Site{5, 2}));
  return out;
}

}  // namespace

TEST_CASE("edge counts") {
  CHECK(enumerate_edges(Region::torus(2, 4)).size() == 32);
  CHECK(enumerate_edges(Region::box(Site{0, 0}, Site{1, 1})).size() == 4);
  CHECK(enumerate_edges(Region::box(Site{0, 0, 0}, Site{2, 2, 2})).size() == 54);
  CHECK(Region::torus(3, 5).num_edges() == 3 * 125);
}

TEST_CASE("edge and site indices round-trip") {
  for (const Region& r : region_grid()) {
    const auto edges = enumerate_edges(r);
    REQUIRE(static_cast<std::int64_t>(edges.size()) == r.num_edges());
    std::set<std::pair<Site, Site>> ends;
    for (std::int64_t i = 0; i < r.num_edges(); ++i) {
      const auto& e = edges[static_cast<std::size_t>(i)];
      CHECK(r.edge_index(e) == i);
      CHECK(r.edge_at(i) == e);
      Site a = e.base, b = r.head(e);
      if (b < a) std::swap(a, b);
      ends.insert({a, b});
    }
    CHECK(static_cast<std::int64_t>(ends.size()) == r.num_edges());
    for (std::int64_t i = 0; i < r.num_sites(); ++i) {
      CHECK(r.site_index(r.site_at(i)) == i);
      if (i > 0) CHECK(r.site_at(i - 1) < r.site_at(i));
    }
  }
}

TEST_CASE("ball sizes against a brute-force scan") {
  CHECK(ball(0, 2).size() == 1);
  CHECK(ball(1, 2).size() == 5);
  CHECK(ball(2, 2).size() == 13);
  for (int d = 2; d <= 4; ++d)
    for (int m = 0; m <= 6; ++m) {
      std::set<Site> scan;
      const Region cube = Region::box(filled(d, -m), filled(d, m));
      for (std::int64_t i = 0; i < cube.num_sites(); ++i)
        if (l1_norm(cube.site_at(i)) <= m) scan.insert(cube.site_at(i));
      const auto b = ball(m, d);
      CHECK(std::set<Site>(b.begin(), b.end()) == scan);
      CHECK(b.size() == scan.size());
      for (const Site& s : b) {
        Site flipped = s;
        flipped[0] = -flipped[0];
        std::swap(flipped[0], flipped[d - 1]);
        CHECK(scan.count(flipped) == 1);
      }
    }
  CHECK_THROWS(ball(-1, 2));
}

TEST_CASE("neighbors") {
  const Region box = Region::box(Site{0, 0}, Site{4, 4});
  CHECK(neighbors(Site{2, 2}, box).size() == 4);
  CHECK(neighbors(Site{0, 0}, box).size() == 2);
  CHECK_THROWS_AS(neighbors(Site{5, 0}, box), std::out_of_range);
  const Region t = Region::torus(3, 4);
  for (std::int64_t i = 0; i < t.num_sites(); ++i) {
    const auto nb = neighbors(t.site_at(i), t);
    CHECK(nb.size() == 6);
    for (const auto& [v, e] : nb) CHECK(t.has_edge(e));
  }
}

TEST_CASE("graph degrees and boundary flags") {
  const LatticeGraph g(Region::torus(2, 5));
  for (std::int32_t v = 0; v < g.num_sites(); ++v) {
    CHECK(g.arcs(v).size() == 4);
    CHECK_FALSE(g.boundary(v));
  }
  const LatticeGraph c(Region::cylinder(2, 3, 0, 4));
  CHECK(c.boundary(static_cast<std::int32_t>(c.region().site_index(Site{0, 1}))));
  CHECK_FALSE(c.boundary(static_cast<std::int32_t>(c.region().site_index(Site{2, 1}))));
}

TEST_CASE("point window") {
  const Region r = point_window(10, 2, 3);
  CHECK(r.lo() == Site{-3, -3});
  CHECK(r.hi() == Site{13, 3});
}
