#include "fpplab/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "path_kernels.hpp"

namespace fpplab {

using detail::kInf;

std::shared_ptr<const LatticeGraph> graph_for(const Region& region) {
  static std::mutex mutex;
  static std::vector<std::shared_ptr<const LatticeGraph>> cache;
  {
    std::lock_guard lock(mutex);
    for (const auto& g : cache)
      if (g->region() == region) return g;
  }
  auto built = std::make_shared<const LatticeGraph>(region);
  std::lock_guard lock(mutex);
  for (const auto& g : cache)
    if (g->region() == region) return g;
  if (cache.size() >= 48) cache.erase(cache.begin());
  cache.push_back(built);
  return built;
}

namespace {

std::int32_t site_id(const Region& r, const Site& s) { return static_cast<std::int32_t>(r.site_index(s)); }

// Grows every face of a box window so its margin beyond the bounding box of
// `core` doubles.
Region grown_box(const Region& r, const Site& core_lo, const Site& core_hi) {
  Site lo = r.lo(), hi = r.hi();
  for (int i = 0; i < r.dim(); ++i) {
    const int mlo = std::max(1, core_lo[i] - lo[i]);
    const int mhi = std::max(1, hi[i] - core_hi[i]);
    lo[i] = core_lo[i] - 2 * mlo;
    hi[i] = core_hi[i] + 2 * mhi;
  }
  return Region::box(lo, hi);
}

bool can_grow(const WeightField& f, const PassageOptions& o) {
  return o.auto_grow && f.resamplable() && f.region().kind() == Region::Kind::Box;
}

std::uint64_t prime_key(const WeightField& f, std::int32_t src, std::int32_t dst) {
  return mix64(f.seed() ^ 0x6A09E667F3BCC909ULL, (static_cast<std::uint64_t>(src) << 32) | static_cast<std::uint32_t>(dst));
}

template <class W>
struct PointSolve {
  std::vector<W> w;
  std::vector<W> fwd;
  std::vector<W> bwd;
  detail::GeodesicDag<W> dag;
};

template <class W>
void fill_result(const LatticeGraph& g, const WeightField& field, PointSolve<W>& s, std::int32_t src, std::int32_t dst,
                 const PassageOptions& options, PassageResult& out) {
  const double scale = std::is_same_v<W, double> ? 1.0 : static_cast<double>(field.integer_scale());
  const W T = s.fwd[static_cast<std::size_t>(dst)];
  out.T = detail::to_real(T, scale);
  out.d_src.resize(s.fwd.size());
  out.d_dst.resize(s.bwd.size());
  for (std::size_t i = 0; i < s.fwd.size(); ++i) {
    out.d_src[i] = detail::to_real(s.fwd[i], scale);
    out.d_dst[i] = detail::to_real(s.bwd[i], scale);
  }
  std::span<const W> w(s.w);
  out.geodesic_dag.clear();
  for (const auto& a : s.dag.arcs) out.geodesic_dag.push_back(a.edge);
  std::sort(out.geodesic_dag.begin(), out.geodesic_dag.end());
  out.geodesic_dag.erase(std::unique(out.geodesic_dag.begin(), out.geodesic_dag.end()), out.geodesic_dag.end());

  out.g_intersection.clear();
  out.intersection_fallback = false;
  if (options.intersection && src != dst) {
    detail::DijkstraScratch<W> scratch;
    auto removal_in = [&](std::int32_t edge) {
      std::vector<W> modified = s.w;
      modified[static_cast<std::size_t>(edge)] = kInf<W>;
      const W without = detail::distance_to<W>(g, modified, src, dst, scratch, T);
      return without > T;
    };
    if (s.dag.zero_weight_arcs) {
      out.intersection_fallback = true;
      for (std::int64_t e : out.geodesic_dag)
        if (removal_in(static_cast<std::int32_t>(e))) out.g_intersection.push_back(e);
    } else {
      const auto pc = detail::count_paths<W>(g, w, s.fwd, s.dag, src, dst, prime_key(field, src, dst));
      for (const auto& a : s.dag.arcs) {
        switch (detail::through_verdict(pc, detail::through_count(pc, a))) {
          case detail::Verdict::In:
            out.g_intersection.push_back(a.edge);
            break;
          case detail::Verdict::Out:
            break;
          case detail::Verdict::Undecided:
            out.intersection_fallback = true;
            if (removal_in(a.edge)) out.g_intersection.push_back(a.edge);
            break;
        }
      }
      std::sort(out.g_intersection.begin(), out.g_intersection.end());
    }
  }

  out.sample_path.clear();
  if (options.sample_path) {
    for (std::int32_t v : detail::backtrack_path<W>(g, w, s.fwd, s.dag, src, dst))
      out.sample_path.push_back(g.region().site_at(v));
  }
}

template <class W>
void solve_point(const LatticeGraph& g, const WeightField& field, std::int32_t src, std::int32_t dst, PointSolve<W>& s) {
  s.w = detail::kernel_weights<W>(field);
  detail::DijkstraScratch<W> scratch;
  detail::dijkstra<W>(g, s.w, src, dst, kInf<W>, s.fwd, scratch);
  const W T = s.fwd[static_cast<std::size_t>(dst)];
  detail::dijkstra<W>(g, s.w, dst, -1, T, s.bwd, scratch);
  s.dag = detail::build_dag<W>(g, s.w, s.fwd, dst);
}

template <class W>
bool run_point(const WeightField& field, const Site& src, const Site& dst, const PassageOptions& options,
               PassageResult& out) {
  const auto g = graph_for(field.region());
  const auto s = site_id(field.region(), src);
  const auto t = site_id(field.region(), dst);
  PointSolve<W> solve;
  solve_point<W>(*g, field, s, t, solve);
  if (solve.dag.touches_boundary && can_grow(field, options) && out.window_grows < options.max_grows) return false;
  out.boundary_contact = solve.dag.touches_boundary;
  fill_result<W>(*g, field, solve, s, t, options, out);
  return true;
}

Site corner_min(const Site& a, const Site& b) {
  Site s = a;
  for (int i = 0; i < a.dim; ++i) s[i] = std::min(a[i], b[i]);
  return s;
}

Site corner_max(const Site& a, const Site& b) {
  Site s = a;
  for (int i = 0; i < a.dim; ++i) s[i] = std::max(a[i], b[i]);
  return s;
}

}  // namespace

PassageResult passage_time(std::shared_ptr<const WeightField> field, const Site& src, const Site& dst,
                           const PassageOptions& options) {
  if (!field) throw std::invalid_argument("null field");
  if (field->region().kind() == Region::Kind::Torus)
    throw std::invalid_argument("point-to-point passage needs a box window; use torus_passage");
  PassageResult out;
  out.src = src;
  out.dst = dst;
  for (;;) {
    const bool done = field->integer_scale() > 0 ? run_point<std::int64_t>(*field, src, dst, options, out)
                                                 : run_point<double>(*field, src, dst, options, out);
    if (done) break;
    const Region bigger = grown_box(field->region(), corner_min(src, dst), corner_max(src, dst));
    field = std::make_shared<const WeightField>(field->resample(bigger));
    ++out.window_grows;
  }
  out.field = std::move(field);
  return out;
}

PassageResult passage_time(const WeightField& field, const Site& src, const Site& dst, const PassageOptions& options) {
  return passage_time(std::make_shared<const WeightField>(field), src, dst, options);
}

namespace {

template <class W>
double value_impl(const WeightField& field, const Site& src, const Site& dst) {
  const auto g = graph_for(field.region());
  const auto w = detail::kernel_weights<W>(field);
  detail::DijkstraScratch<W> scratch;
  const W T = detail::distance_to<W>(*g, w, site_id(field.region(), src), site_id(field.region(), dst), scratch);
  return detail::to_real(T, std::is_same_v<W, double> ? 1.0 : static_cast<double>(field.integer_scale()));
}

}  // namespace

double passage_value(const WeightField& field, const Site& src, const Site& dst) {
  return field.integer_scale() > 0 ? value_impl<std::int64_t>(field, src, dst) : value_impl<double>(field, src, dst);
}

std::vector<std::int64_t> geodesic_intersection(const PassageResult& result) {
  if (!result.g_intersection.empty() || result.geodesic_dag.empty() || result.src == result.dst)
    return result.g_intersection;
  PassageOptions o;
  o.auto_grow = false;
  o.sample_path = false;
  return passage_time(result.field, result.src, result.dst, o).g_intersection;
}

std::vector<std::int64_t> intersection_by_removal(const WeightField& field, const Site& src, const Site& dst) {
  std::vector<std::int64_t> out;
  const double T = passage_value(field, src, dst);
  for (std::int64_t e = 0; e < field.region().num_edges(); ++e) {
    // Deleting an edge is modelled by a weight large enough that no geodesic can use it.
    double big = 1;
    for (double w : field.weights()) big += w;
    const double without = passage_value(field.with_weight(e, big), src, dst);
    if (without > T) out.push_back(e);
  }
  return out;
}

double CriticalityValue::passage_at(double t) const { return std::min(T_without, through_offset + t); }

namespace {

template <class W>
bool criticality_impl(const WeightField& field, std::int64_t edge, const Site& src, const Site& dst,
                      const PassageOptions& options, int grows, CriticalityValue& out) {
  const auto g = graph_for(field.region());
  const auto s = site_id(field.region(), src);
  const auto t = site_id(field.region(), dst);
  auto w = detail::kernel_weights<W>(field);
  w[static_cast<std::size_t>(edge)] = kInf<W>;
  detail::DijkstraScratch<W> scratch;
  std::vector<W> fwd, bwd;
  detail::dijkstra<W>(*g, w, s, t, kInf<W>, fwd, scratch);
  const W Tw = fwd[static_cast<std::size_t>(t)];
  detail::dijkstra<W>(*g, w, t, -1, Tw, bwd, scratch);
  const auto dag = detail::build_dag<W>(*g, w, fwd, t);
  if (dag.touches_boundary && can_grow(field, options) && grows < options.max_grows) return false;
  const auto a = static_cast<std::size_t>(g->tail(static_cast<std::int32_t>(edge)));
  const auto b = static_cast<std::size_t>(g->head(static_cast<std::int32_t>(edge)));
  auto sum = [](W x, W y) { return (x >= kInf<W> || y >= kInf<W>) ? kInf<W> : x + y; };
  const W A = std::min(sum(fwd[a], bwd[b]), sum(fwd[b], bwd[a]));
  const double scale = std::is_same_v<W, double> ? 1.0 : static_cast<double>(field.integer_scale());
  out.T_without = detail::to_real(Tw, scale);
  out.through_offset = detail::to_real(A, scale);
  out.D = A >= Tw ? 0.0 : detail::to_real<W>(Tw - A, scale);
  out.boundary_contact = dag.touches_boundary;
  return true;
}

}  // namespace

CriticalityValue edge_criticality(const WeightField& field_in, std::int64_t edge, const Site& src, const Site& dst,
                                  const PassageOptions& options) {
  if (edge < 0 || edge >= field_in.region().num_edges()) throw std::out_of_range("edge outside window");
  CriticalityValue out;
  WeightField field = field_in;
  const EdgeId id = field.region().edge_at(edge);
  for (;;) {
    const std::int64_t e = field.region().edge_index(id);
    const bool done = field.integer_scale() > 0
                          ? criticality_impl<std::int64_t>(field, e, src, dst, options, out.window_grows, out)
                          : criticality_impl<double>(field, e, src, dst, options, out.window_grows, out);
    if (done) break;
    field = field.resample(grown_box(field.region(), corner_min(src, dst), corner_max(src, dst)));
    ++out.window_grows;
  }
  return out;
}

double single_edge_update(const PassageResult& result, std::int64_t edge, double new_t) {
  const WeightField& field = *result.field;
  if (result.window().kind() == Region::Kind::Torus)
    throw std::invalid_argument("single_edge_update applies to point-to-point results");
  const double old_t = field.weight(edge);
  if (new_t == old_t) return result.T;
  const auto g = graph_for(field.region());
  const auto a = static_cast<std::size_t>(g->tail(static_cast<std::int32_t>(edge)));
  const auto b = static_cast<std::size_t>(g->head(static_cast<std::int32_t>(edge)));
  auto recompute = [&] { return passage_value(field.with_weight(edge, new_t), result.src, result.dst); };
  if (new_t > old_t) {
    // Raising an edge that some geodesic avoids cannot change T.
    if (!std::binary_search(result.geodesic_dag.begin(), result.geodesic_dag.end(), edge)) return result.T;
    return recompute();
  }
  const auto& ds = result.d_src;
  const auto& dd = result.d_dst;
  const double via = std::min(ds[a] + new_t + dd[b], ds[b] + new_t + dd[a]);
  if (!(via < result.T)) return result.T;
  // A distance field routed through e only overestimates its orientation, so
  // the screen is exact in integer arithmetic. In binary64 the summation order
  // differs from a fresh search; recompute to match it bit for bit.
  const auto scale = static_cast<double>(field.integer_scale());
  if (scale > 0 && std::nearbyint(new_t * scale) / scale == new_t) {
    auto q = [&](double x) { return std::llround(x * scale); };
    const auto t = q(new_t);
    const auto best = std::min(q(ds[a]) + t + q(dd[b]), q(ds[b]) + t + q(dd[a]));
    return static_cast<double>(best) / scale;
  }
  return recompute();
}

int fourth_root_ceil(int n) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  int m = 0;
  while (static_cast<std::int64_t>(m) * m * m * m < n) ++m;
  return m;
}

AveragedPassage averaged_passage(const WeightField& field, int n, const PassageOptions& options) {
  return averaged_passage(field, n, fourth_root_ceil(n), options);
}

namespace {

template <class W>
bool averaged_impl(const WeightField& field, int n, int m, const PassageOptions& options, AveragedPassage& out) {
  const auto g = graph_for(field.region());
  const auto w = detail::kernel_weights<W>(field);
  const double scale = std::is_same_v<W, double> ? 1.0 : static_cast<double>(field.integer_scale());
  const int d = field.region().dim();
  detail::DijkstraScratch<W> scratch;
  std::vector<W> fwd;
  out.sources = ball(m, d);
  out.terms.clear();
  bool contact = false;
  for (const Site& z : out.sources) {
    const auto s = site_id(field.region(), z);
    const auto t = site_id(field.region(), z + Site::unit(d, 0, n));
    detail::dijkstra<W>(*g, w, s, t, kInf<W>, fwd, scratch);
    const W T = fwd[static_cast<std::size_t>(t)];
    contact = contact || detail::build_dag<W>(*g, w, fwd, t).touches_boundary;
    if (contact && can_grow(field, options) && out.window_grows < options.max_grows) return false;
    out.terms.push_back(detail::to_real(T, scale));
  }
  out.boundary_contact = contact;
  double sum = 0;
  for (double v : out.terms) sum += v;
  out.F = sum / static_cast<double>(out.terms.size());
  return true;
}

}  // namespace

AveragedPassage averaged_passage(const WeightField& field_in, int n, int m, const PassageOptions& options) {
  if (n < 1 || m < 0) throw std::invalid_argument("averaged_passage needs n >= 1 and m >= 0");
  AveragedPassage out;
  out.m = m;
  WeightField field = field_in;
  const int d = field.region().dim();
  Site core_lo = Site::origin(d), core_hi = Site::origin(d);
  for (int i = 0; i < d; ++i) {
    core_lo[i] = -m;
    core_hi[i] = m;
  }
  core_hi[0] = n + m;
  for (;;) {
    const bool done = field.integer_scale() > 0 ? averaged_impl<std::int64_t>(field, n, m, options, out)
                                                : averaged_impl<double>(field, n, m, options, out);
    if (done) break;
    field = field.resample(grown_box(field.region(), core_lo, core_hi));
    ++out.window_grows;
  }
  return out;
}

}  // namespace fpplab

namespace fpplab {

namespace {

template <class W>
std::vector<double> removal_impl(const PassageResult& result) {
  const WeightField& field = *result.field;
  const Region& r = field.region();
  const auto g = graph_for(r);
  const auto w = detail::kernel_weights<W>(field);
  const double scale = std::is_same_v<W, double> ? 1.0 : static_cast<double>(field.integer_scale());
  std::vector<std::int32_t> path;
  for (const Site& s : result.sample_path) path.push_back(site_id(r, s));
  const std::size_t k = path.empty() ? 0 : path.size() - 1;
  std::vector<std::int32_t> path_edge(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& arc : g->arcs(path[i]))
      if (arc.site == path[i + 1]) path_edge[i] = arc.edge;
  }
  std::vector<double> out(k);
  detail::DijkstraScratch<W> scratch;
  const bool zero = std::any_of(w.begin(), w.end(), [](W x) { return x == W{0}; });
  if (zero) {
    for (std::size_t i = 0; i < k; ++i) {
      auto cut = w;
      cut[static_cast<std::size_t>(path_edge[i])] = kInf<W>;
      out[i] = detail::to_real(detail::distance_to<W>(*g, cut, path.front(), path.back(), scratch), scale);
    }
    return out;
  }
  std::vector<W> ds, dt;
  detail::dijkstra<W>(*g, w, path.front(), -1, kInf<W>, ds, scratch);
  detail::dijkstra<W>(*g, w, path.back(), -1, kInf<W>, dt, scratch);

  // label[v]: index of the path vertex where the source tree branch to v leaves the path.
  const auto nsites = static_cast<std::size_t>(g->num_sites());
  std::vector<std::int32_t> label(nsites, -1), order;
  for (std::size_t i = 0; i < path.size(); ++i) label[static_cast<std::size_t>(path[i])] = static_cast<std::int32_t>(i);
  for (std::int32_t v = 0; v < g->num_sites(); ++v)
    if (ds[static_cast<std::size_t>(v)] < kInf<W>) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    const W da = ds[static_cast<std::size_t>(a)], db = ds[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });
  for (std::int32_t v : order) {
    auto& lv = label[static_cast<std::size_t>(v)];
    if (lv >= 0) continue;
    for (const auto& arc : g->arcs(v)) {
      if (detail::tight(ds, std::span<const W>(w), arc.site, v, arc.edge)) {
        lv = label[static_cast<std::size_t>(arc.site)];
        break;
      }
    }
  }
  std::vector<std::uint8_t> on_path_edge(static_cast<std::size_t>(g->num_edges()), 0);
  for (std::int32_t e : path_edge) on_path_edge[static_cast<std::size_t>(e)] = 1;
  struct Candidate {
    W value;
    std::int32_t lo, hi;  // covers path edges lo .. hi - 1
  };
  std::vector<Candidate> cands;
  for (std::int32_t e = 0; e < g->num_edges(); ++e) {
    if (on_path_edge[static_cast<std::size_t>(e)]) continue;
    std::int32_t x = g->tail(e), y = g->head(e);
    std::int32_t lx = label[static_cast<std::size_t>(x)], ly = label[static_cast<std::size_t>(y)];
    if (lx < 0 || ly < 0 || lx == ly) continue;
    if (lx > ly) {
      std::swap(x, y);
      std::swap(lx, ly);
    }
    const W a = ds[static_cast<std::size_t>(x)], b = dt[static_cast<std::size_t>(y)];
    if (a >= kInf<W> || b >= kInf<W>) continue;
    cands.push_back({a + w[static_cast<std::size_t>(e)] + b, lx, ly});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  // next[i]: first unassigned index >= i (path-compressed).
  std::vector<std::int32_t> next(k + 1);
  for (std::size_t i = 0; i <= k; ++i) next[i] = static_cast<std::int32_t>(i);
  auto find = [&](std::int32_t i) {
    std::int32_t root = i;
    while (next[static_cast<std::size_t>(root)] != root) root = next[static_cast<std::size_t>(root)];
    while (next[static_cast<std::size_t>(i)] != root) {
      const std::int32_t up = next[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(i)] = root;
      i = up;
    }
    return root;
  };
  std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
  for (const auto& c : cands) {
    for (std::int32_t i = find(c.lo); i < c.hi; i = find(i)) {
      out[static_cast<std::size_t>(i)] = detail::to_real(c.value, scale);
      next[static_cast<std::size_t>(i)] = i + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<double> path_removal_times(const PassageResult& result) {
  if (!result.field || result.window().kind() == Region::Kind::Torus)
    throw std::invalid_argument("path_removal_times applies to point-to-point results");
  if (result.sample_path.empty()) throw std::invalid_argument("result carries no sample path");
  return result.field->integer_scale() > 0 ? removal_impl<std::int64_t>(result) : removal_impl<double>(result);
}

}  // namespace fpplab
