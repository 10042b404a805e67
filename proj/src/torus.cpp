#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpplab/fpp.hpp"
#include "path_kernels.hpp"

namespace fpplab {

using detail::kInf;

namespace {

struct Lift {
  Region cylinder;
  std::vector<std::int32_t> torus_edge;  // cylinder edge -> torus edge
};

Lift make_lift(const Region& torus, int cut, int margin) {
  const int n = torus.side();
  Lift lift{Region::cylinder(torus.dim(), n, cut - margin, cut + n + margin), {}};
  lift.torus_edge.resize(static_cast<std::size_t>(lift.cylinder.num_edges()));
  for (std::int64_t e = 0; e < lift.cylinder.num_edges(); ++e) {
    const EdgeId id = lift.cylinder.edge_at(e);
    lift.torus_edge[static_cast<std::size_t>(e)] =
        static_cast<std::int32_t>(torus.edge_index({torus.wrap(id.base), id.axis}));
  }
  return lift;
}

std::vector<Site> cut_sites(const Region& torus, int cut) {
  const int d = torus.dim();
  const int n = torus.side();
  std::vector<Site> out;
  Site s = Site::origin(d);
  s[0] = cut;
  std::int64_t count = 1;
  for (int i = 1; i < d; ++i) count *= n;
  for (std::int64_t k = 0; k < count; ++k) {
    std::int64_t r = k;
    for (int i = d - 1; i >= 1; --i) {
      s[i] = static_cast<int>(r % n);
      r /= n;
    }
    out.push_back(s);
  }
  return out;
}

template <class W>
struct TorusSolve {
  W best = kInf<W>;
  std::vector<std::int32_t> optimal;  // cylinder source sites
  bool contact = false;
};

template <class W>
TorusSolve<W> scan_cuts(const LatticeGraph& g, std::span<const W> w, const std::vector<Site>& cuts, int n,
                        std::vector<std::vector<W>>* fields) {
  TorusSolve<W> out;
  detail::DijkstraScratch<W> scratch;
  std::vector<W> dist;
  const Region& cyl = g.region();
  for (const Site& c : cuts) {
    const auto s = static_cast<std::int32_t>(cyl.site_index(c));
    const auto t = static_cast<std::int32_t>(cyl.site_index(c + Site::unit(c.dim, 0, n)));
    detail::dijkstra<W>(g, w, s, t, out.best, dist, scratch);
    const W T = dist[static_cast<std::size_t>(t)];
    if (T >= kInf<W> || T > out.best) continue;
    if (T < out.best) {
      out.best = T;
      out.optimal.clear();
      if (fields) fields->clear();
    }
    out.optimal.push_back(s);
    if (fields) fields->push_back(dist);
  }
  return out;
}

template <class W>
bool torus_impl(const WeightField& field, const TorusOptions& options, int margin, bool last, PassageResult& out) {
  const Region& torus = field.region();
  const int n = torus.side();
  const int cut = ((options.cut % n) + n) % n;
  const Lift lift = make_lift(torus, cut, margin);
  const auto g = graph_for(lift.cylinder);
  const auto tw = detail::kernel_weights<W>(field);
  std::vector<W> w(lift.torus_edge.size());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = tw[static_cast<std::size_t>(lift.torus_edge[e])];
  const auto cuts = cut_sites(torus, cut);
  std::vector<std::vector<W>> fwds;
  const auto solve = scan_cuts<W>(*g, w, cuts, n, &fwds);
  if (solve.optimal.empty()) throw std::runtime_error("torus has no winding path");

  std::vector<detail::GeodesicDag<W>> dags;
  bool contact = false;
  for (std::size_t k = 0; k < solve.optimal.size(); ++k) {
    const Site src = lift.cylinder.site_at(solve.optimal[k]);
    const auto dst = static_cast<std::int32_t>(lift.cylinder.site_index(src + Site::unit(torus.dim(), 0, n)));
    dags.push_back(detail::build_dag<W>(*g, w, fwds[k], dst));
    contact = contact || dags.back().touches_boundary;
  }
  if (contact && !last) return false;

  const double scale = std::is_same_v<W, double> ? 1.0 : static_cast<double>(field.integer_scale());
  out.T = detail::to_real(solve.best, scale);
  out.boundary_contact = contact;
  out.geodesic_dag.clear();
  for (const auto& dag : dags)
    for (const auto& a : dag.arcs) out.geodesic_dag.push_back(lift.torus_edge[static_cast<std::size_t>(a.edge)]);
  std::sort(out.geodesic_dag.begin(), out.geodesic_dag.end());
  out.geodesic_dag.erase(std::unique(out.geodesic_dag.begin(), out.geodesic_dag.end()), out.geodesic_dag.end());

  out.g_intersection.clear();
  out.intersection_fallback = false;
  if (options.intersection) {
    // Candidates start as every DAG edge and are filtered per optimal cut site.
    std::vector<std::uint8_t> member(static_cast<std::size_t>(torus.num_edges()), 0);
    for (std::int64_t e : out.geodesic_dag) member[static_cast<std::size_t>(e)] = 1;
    std::vector<std::int64_t> undecided;
    bool zero = false;
    for (const auto& dag : dags) zero = zero || dag.zero_weight_arcs;
    if (zero) {
      undecided = out.geodesic_dag;
    } else {
      for (std::size_t k = 0; k < dags.size(); ++k) {
        const std::int32_t src = solve.optimal[k];
        const auto dst =
            static_cast<std::int32_t>(lift.cylinder.site_index(lift.cylinder.site_at(src) + Site::unit(torus.dim(), 0, n)));
        const auto pc = detail::count_paths<W>(*g, w, fwds[k], dags[k], src, dst,
                                               mix64(field.seed() ^ 0xBB67AE8584CAA73BULL, static_cast<std::uint64_t>(src)));
        std::vector<std::array<std::uint64_t, 2>> through(static_cast<std::size_t>(torus.num_edges()), {0, 0});
        for (const auto& a : dags[k].arcs) {
          const auto c = detail::through_count(pc, a);
          auto& acc = through[static_cast<std::size_t>(lift.torus_edge[static_cast<std::size_t>(a.edge)])];
          for (std::size_t j = 0; j < 2; ++j) acc[j] = (acc[j] + c[j]) % pc.primes[j];
        }
        for (std::int64_t e : out.geodesic_dag) {
          auto& m = member[static_cast<std::size_t>(e)];
          if (!m) continue;
          switch (detail::through_verdict(pc, through[static_cast<std::size_t>(e)])) {
            case detail::Verdict::In:
              break;
            case detail::Verdict::Out:
              m = 0;
              break;
            case detail::Verdict::Undecided:
              m = 2;
              break;
          }
        }
      }
      for (std::int64_t e : out.geodesic_dag) {
        const auto m = member[static_cast<std::size_t>(e)];
        if (m == 1) out.g_intersection.push_back(e);
        if (m == 2) undecided.push_back(e);
      }
    }
    if (!undecided.empty()) {
      out.intersection_fallback = true;
      for (std::int64_t e : undecided) {
        std::vector<W> cut_w = w;
        for (std::size_t ce = 0; ce < cut_w.size(); ++ce)
          if (lift.torus_edge[ce] == e) cut_w[ce] = kInf<W>;
        const auto again = scan_cuts<W>(*g, cut_w, cuts, n, nullptr);
        if (again.best > solve.best) out.g_intersection.push_back(e);
      }
      std::sort(out.g_intersection.begin(), out.g_intersection.end());
    }
  }

  out.sample_path.clear();
  {
    const std::int32_t src = solve.optimal.front();
    const auto dst =
        static_cast<std::int32_t>(lift.cylinder.site_index(lift.cylinder.site_at(src) + Site::unit(torus.dim(), 0, n)));
    for (std::int32_t v : detail::backtrack_path<W>(*g, w, fwds.front(), dags.front(), src, dst))
      out.sample_path.push_back(torus.wrap(lift.cylinder.site_at(v)));
    out.src = out.dst = torus.wrap(lift.cylinder.site_at(src));
  }
  return true;
}

}  // namespace

PassageResult torus_passage(const WeightField& field, const TorusOptions& options) {
  if (field.region().kind() != Region::Kind::Torus) throw std::invalid_argument("torus_passage needs a torus field");
  PassageResult out;
  out.field = std::make_shared<const WeightField>(field);
  int margin = std::max(1, (field.region().side() + 1) / 2);
  for (int grows = 0;; ++grows) {
    const bool last = grows >= options.max_grows;
    const bool done = field.integer_scale() > 0 ? torus_impl<std::int64_t>(field, options, margin, last, out)
                                                : torus_impl<double>(field, options, margin, last, out);
    if (done) {
      out.window_grows = grows;
      break;
    }
    margin *= 2;
  }
  return out;
}

std::vector<std::int64_t> torus_intersection_by_removal(const WeightField& field) {
  TorusOptions o;
  o.intersection = false;
  const double T = torus_passage(field, o).T;
  double big = 1;
  for (double w : field.weights()) big += w;
  std::vector<std::int64_t> out;
  for (std::int64_t e = 0; e < field.region().num_edges(); ++e)
    if (torus_passage(field.with_weight(e, big), o).T > T) out.push_back(e);
  return out;
}

}  // namespace fpplab
