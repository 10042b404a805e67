#pragma once

// Brute-force references used by the unit and acceptance tests. They walk the
// lattice through Region::neighbors only, never through the solver code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "fpplab/lattice.hpp"
#include "fpplab/weights.hpp"

namespace oracle {

struct PathMin {
  double T = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> intersection;  // edges common to every minimizing path
  int minimizers = 0;
};

inline void note(PathMin& best, double len, const std::vector<std::int64_t>& edges, double tol) {
  if (len < best.T - tol) {
    best.T = len;
    best.intersection = edges;
    std::sort(best.intersection.begin(), best.intersection.end());
    best.minimizers = 1;
  } else if (std::abs(len - best.T) <= tol) {
    std::vector<std::int64_t> sorted = edges, keep;
    std::sort(sorted.begin(), sorted.end());
    std::set_intersection(best.intersection.begin(), best.intersection.end(), sorted.begin(), sorted.end(),
                          std::back_inserter(keep));
    best.intersection = keep;
    ++best.minimizers;
  }
}

/// Minimum over all self-avoiding paths src -> dst in the region.
inline PathMin self_avoiding_min(const fpplab::Region& r, std::span<const double> w, const fpplab::Site& src,
                                 const fpplab::Site& dst, double tol = 0) {
  PathMin best;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(r.num_sites()), 0);
  std::vector<std::int64_t> edges;
  std::function<void(const fpplab::Site&, double)> dfs = [&](const fpplab::Site& u, double len) {
    if (u == dst) {
      note(best, len, edges, tol);
      return;
    }
    for (const auto& [v, e] : fpplab::neighbors(u, r)) {
      const auto vi = static_cast<std::size_t>(r.site_index(v));
      if (seen[vi]) continue;
      seen[vi] = 1;
      const auto ei = r.edge_index(e);
      edges.push_back(ei);
      dfs(v, len + w[static_cast<std::size_t>(ei)]);
      edges.pop_back();
      seen[vi] = 0;
    }
  };
  seen[static_cast<std::size_t>(r.site_index(src))] = 1;
  dfs(src, 0);
  return best;
}

/// Minimum over simple torus cycles of length <= max_len whose axis-0 winding is one.
inline PathMin winding_cycle_min(const fpplab::Region& torus, std::span<const double> w, int max_len) {
  PathMin best;
  const int n = torus.side();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(torus.num_sites()), 0);
  std::vector<std::int64_t> edges;
  // Every winding cycle crosses x_0 = 0, so starting there covers them all.
  for (std::int64_t si = 0; si < torus.num_sites(); ++si) {
    const fpplab::Site s = torus.site_at(si);
    if (s[0] != 0) continue;
    std::function<void(const fpplab::Site&, int, double)> dfs = [&](const fpplab::Site& u, int shift, double len) {
      if (static_cast<int>(edges.size()) >= max_len) return;
      for (const auto& [v, e] : fpplab::neighbors(u, torus)) {
        int step = 0;
        if (e.axis == 0) step = (e.base == u) ? 1 : -1;
        const auto ei = torus.edge_index(e);
        const double next = len + w[static_cast<std::size_t>(ei)];
        if (v == s) {
          if (shift + step == n && !edges.empty() && edges.front() != ei) {
            edges.push_back(ei);
            note(best, next, edges, 0);
            edges.pop_back();
          }
          continue;
        }
        const auto vi = static_cast<std::size_t>(torus.site_index(v));
        if (seen[vi]) continue;
        seen[vi] = 1;
        edges.push_back(ei);
        dfs(v, shift + step, next);
        edges.pop_back();
        seen[vi] = 0;
      }
    };
    seen[static_cast<std::size_t>(si)] = 1;
    dfs(s, 0, 0);
    seen[static_cast<std::size_t>(si)] = 0;
  }
  return best;
}

}  // namespace oracle
