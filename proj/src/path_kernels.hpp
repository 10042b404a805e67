#pragma once

// Shortest-path kernels shared by the point-to-point, torus and criticality
// code. Templated on the arithmetic: std::int64_t for scaled atomic weights,
// double otherwise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "fpplab/lattice.hpp"
#include "fpplab/weights.hpp"
#include "modprime.hpp"

namespace fpplab::detail {

template <class W>
constexpr W kInf = std::numeric_limits<W>::max() / 4;
template <>
inline constexpr double kInf<double> = std::numeric_limits<double>::infinity();

template <class W>
std::vector<W> kernel_weights(const WeightField& field) {
  std::vector<W> out(field.weights().size());
  if constexpr (std::is_same_v<W, double>) {
    std::copy(field.weights().begin(), field.weights().end(), out.begin());
  } else {
    const auto scale = static_cast<double>(field.integer_scale());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = static_cast<W>(std::llround(field.weights()[i] * scale));
  }
  return out;
}

template <class W>
double to_real(W v, double scale) {
  if (v >= kInf<W>) return std::numeric_limits<double>::infinity();
  if constexpr (std::is_same_v<W, double>) {
    return v;
  } else {
    return static_cast<double>(v) / scale;
  }
}

template <class W>
W from_real(double v, double scale) {
  if constexpr (std::is_same_v<W, double>) {
    return v;
  } else {
    return static_cast<W>(std::llround(v * scale));
  }
}

// Reusable per-call buffers.
template <class W>
struct DijkstraScratch {
  std::vector<std::int32_t> touched;
  std::vector<std::pair<W, std::int32_t>> heap;
};

/// Settles sites in increasing distance from `source`. When `target` >= 0 the
/// bound tightens to dist(target) once it is settled. Every site whose distance
/// exceeds the bound is left at kInf. Edges whose weight is >= kInf are absent.
/// Stale heap entries are skipped on pop (lazy deletion).
template <class W>
void dijkstra(const LatticeGraph& g, std::span<const W> w, std::int32_t source, std::int32_t target, W bound,
              std::vector<W>& dist, DijkstraScratch<W>& scratch) {
  const auto n = static_cast<std::size_t>(g.num_sites());
  dist.assign(n, kInf<W>);
  scratch.touched.clear();
  auto& heap = scratch.heap;
  heap.clear();
  using Item = std::pair<W, std::int32_t>;
  const auto cmp = std::greater<Item>();
  dist[static_cast<std::size_t>(source)] = 0;
  scratch.touched.push_back(source);
  heap.emplace_back(W{0}, source);
  while (!heap.empty()) {
    const auto [du, u] = heap.front();
    if (du > bound) break;
    std::pop_heap(heap.begin(), heap.end(), cmp);
    heap.pop_back();
    if (du != dist[static_cast<std::size_t>(u)]) continue;
    if (u == target) bound = std::min(bound, du);
    for (const auto& arc : g.arcs(u)) {
      const W we = w[static_cast<std::size_t>(arc.edge)];
      if (we >= kInf<W>) continue;
      const W cand = du + we;
      auto& dv = dist[static_cast<std::size_t>(arc.site)];
      if (cand < dv) {
        if (dv == kInf<W>) scratch.touched.push_back(arc.site);
        dv = cand;
        heap.emplace_back(cand, arc.site);
        std::push_heap(heap.begin(), heap.end(), cmp);
      }
    }
  }
  // Every site within the bound has been settled; the rest only hold tentative values.
  for (std::int32_t v : scratch.touched)
    if (dist[static_cast<std::size_t>(v)] > bound) dist[static_cast<std::size_t>(v)] = kInf<W>;
}

template <class W>
W distance_to(const LatticeGraph& g, std::span<const W> w, std::int32_t source, std::int32_t target,
              DijkstraScratch<W>& scratch, W bound = kInf<W>) {
  std::vector<W> dist;
  dijkstra<W>(g, w, source, target, bound, dist, scratch);
  return dist[static_cast<std::size_t>(target)];
}

struct DagArc {
  std::int32_t tail;
  std::int32_t head;
  std::int32_t edge;
};

/// Edges on some shortest src -> dst walk, oriented along the walk.
template <class W>
struct GeodesicDag {
  std::vector<DagArc> arcs;
  std::vector<std::uint8_t> on_geo;
  std::vector<std::int32_t> sites;  // on_geo sites, ascending distance from src
  bool zero_weight_arcs = false;
  bool touches_boundary = false;
};

template <class W>
bool tight(const std::vector<W>& fwd, std::span<const W> w, std::int32_t u, std::int32_t v, std::int32_t e) {
  const W du = fwd[static_cast<std::size_t>(u)];
  const W we = w[static_cast<std::size_t>(e)];
  if (du >= kInf<W> || we >= kInf<W>) return false;
  return du + we == fwd[static_cast<std::size_t>(v)];
}

template <class W>
GeodesicDag<W> build_dag(const LatticeGraph& g, std::span<const W> w, const std::vector<W>& fwd, std::int32_t dst) {
  GeodesicDag<W> dag;
  dag.on_geo.assign(static_cast<std::size_t>(g.num_sites()), 0);
  if (fwd[static_cast<std::size_t>(dst)] >= kInf<W>) return dag;
  std::vector<std::int32_t> stack{dst};
  dag.on_geo[static_cast<std::size_t>(dst)] = 1;
  while (!stack.empty()) {
    const std::int32_t v = stack.back();
    stack.pop_back();
    dag.sites.push_back(v);
    if (g.boundary(v)) dag.touches_boundary = true;
    for (const auto& arc : g.arcs(v)) {
      if (!tight(fwd, w, arc.site, v, arc.edge)) continue;
      dag.arcs.push_back({arc.site, v, arc.edge});
      if (w[static_cast<std::size_t>(arc.edge)] == W{0}) dag.zero_weight_arcs = true;
      if (!dag.on_geo[static_cast<std::size_t>(arc.site)]) {
        dag.on_geo[static_cast<std::size_t>(arc.site)] = 1;
        stack.push_back(arc.site);
      }
    }
  }
  std::sort(dag.sites.begin(), dag.sites.end(), [&](std::int32_t a, std::int32_t b) {
    const W da = fwd[static_cast<std::size_t>(a)], db = fwd[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });
  return dag;
}

/// Number of DAG paths src -> v and v -> dst modulo two primes.
struct PathCounts {
  std::array<std::uint64_t, 2> primes{};
  std::array<std::vector<std::uint64_t>, 2> from_src;
  std::array<std::vector<std::uint64_t>, 2> to_dst;
  std::array<std::uint64_t, 2> total{};
};

template <class W>
PathCounts count_paths(const LatticeGraph& g, std::span<const W> w, const std::vector<W>& fwd, const GeodesicDag<W>& dag,
                       std::int32_t src, std::int32_t dst, std::uint64_t key) {
  PathCounts pc;
  pc.primes = random_prime_pair(key);
  const auto n = static_cast<std::size_t>(g.num_sites());
  for (std::size_t k = 0; k < 2; ++k) {
    const std::uint64_t p = pc.primes[k];
    auto& fs = pc.from_src[k];
    auto& td = pc.to_dst[k];
    fs.assign(n, 0);
    td.assign(n, 0);
    fs[static_cast<std::size_t>(src)] = 1;
    for (std::int32_t v : dag.sites) {
      std::uint64_t acc = fs[static_cast<std::size_t>(v)];
      for (const auto& arc : g.arcs(v))
        if (dag.on_geo[static_cast<std::size_t>(arc.site)] && tight(fwd, w, arc.site, v, arc.edge)) {
          acc += fs[static_cast<std::size_t>(arc.site)];
          if (acc >= p) acc -= p;
        }
      fs[static_cast<std::size_t>(v)] = acc;
    }
    td[static_cast<std::size_t>(dst)] = 1;
    for (auto it = dag.sites.rbegin(); it != dag.sites.rend(); ++it) {
      const std::int32_t v = *it;
      std::uint64_t acc = td[static_cast<std::size_t>(v)];
      for (const auto& arc : g.arcs(v))
        if (dag.on_geo[static_cast<std::size_t>(arc.site)] && tight(fwd, w, v, arc.site, arc.edge)) {
          acc += td[static_cast<std::size_t>(arc.site)];
          if (acc >= p) acc -= p;
        }
      td[static_cast<std::size_t>(v)] = acc;
    }
    pc.total[k] = fs[static_cast<std::size_t>(dst)];
  }
  return pc;
}

enum class Verdict { Out, In, Undecided };

inline Verdict through_verdict(const PathCounts& pc, std::array<std::uint64_t, 2> through) {
  const bool a = through[0] == pc.total[0];
  const bool b = through[1] == pc.total[1];
  if (a && b) return Verdict::In;
  if (!a && !b) return Verdict::Out;
  return Verdict::Undecided;
}

inline std::array<std::uint64_t, 2> through_count(const PathCounts& pc, const DagArc& arc) {
  std::array<std::uint64_t, 2> out{};
  for (std::size_t k = 0; k < 2; ++k)
    out[k] = mulmod(pc.from_src[k][static_cast<std::size_t>(arc.tail)], pc.to_dst[k][static_cast<std::size_t>(arc.head)],
                    pc.primes[k]);
  return out;
}

/// One geodesic from src to dst: backtrack from dst through DAG predecessors,
/// taking the smallest site index (lexicographically smallest site) each step.
template <class W>
std::vector<std::int32_t> backtrack_path(const LatticeGraph& g, std::span<const W> w, const std::vector<W>& fwd,
                                         const GeodesicDag<W>& dag, std::int32_t src, std::int32_t dst) {
  std::vector<std::int32_t> path{dst};
  if (dag.sites.empty()) return {};
  // Hop counts keep the walk finite when zero-weight arcs create ties.
  std::vector<std::int32_t> hops;
  if (dag.zero_weight_arcs) {
    hops.assign(static_cast<std::size_t>(g.num_sites()), std::numeric_limits<std::int32_t>::max());
    hops[static_cast<std::size_t>(src)] = 0;
    std::vector<std::int32_t> frontier{src};
    while (!frontier.empty()) {
      std::vector<std::int32_t> next;
      for (std::int32_t u : frontier)
        for (const auto& arc : g.arcs(u)) {
          const auto v = static_cast<std::size_t>(arc.site);
          if (dag.on_geo[v] && tight(fwd, w, u, arc.site, arc.edge) && hops[v] == std::numeric_limits<std::int32_t>::max()) {
            hops[v] = hops[static_cast<std::size_t>(u)] + 1;
            next.push_back(arc.site);
          }
        }
      frontier.swap(next);
    }
  }
  std::int32_t v = dst;
  while (v != src) {
    std::int32_t best = -1;
    for (const auto& arc : g.arcs(v)) {
      const std::int32_t u = arc.site;
      if (!dag.on_geo[static_cast<std::size_t>(u)] || !tight(fwd, w, u, v, arc.edge)) continue;
      if (!hops.empty() && hops[static_cast<std::size_t>(u)] >= hops[static_cast<std::size_t>(v)]) continue;
      if (best < 0 || u < best) best = u;
    }
    if (best < 0) break;
    v = best;
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace fpplab::detail
