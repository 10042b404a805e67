#include "fpplab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fpplab/rng.hpp"

namespace fpplab {

EfronSteinEstimate efron_stein_bound(const PassageResult& result, const DistributionSpec& spec, int resamples,
                                     std::uint64_t key) {
  const WeightField& field = *result.field;
  const Region& r = field.region();
  const auto g = graph_for(r);
  const double T = result.T;
  const auto& ds = result.d_src;
  const auto& dd = result.d_dst;

  std::vector<double> without(static_cast<std::size_t>(r.num_edges()), T);
  std::vector<std::uint8_t> on_path(static_cast<std::size_t>(r.num_edges()), 0);
  if (result.sample_path.size() > 1) {
    const auto times = path_removal_times(result);
    for (std::size_t i = 0; i + 1 < result.sample_path.size(); ++i) {
      const auto u = static_cast<std::int32_t>(r.site_index(result.sample_path[i]));
      const auto v = static_cast<std::int32_t>(r.site_index(result.sample_path[i + 1]));
      for (const auto& arc : g->arcs(u))
        if (arc.site == v) {
          on_path[static_cast<std::size_t>(arc.edge)] = 1;
          without[static_cast<std::size_t>(arc.edge)] = times[i];
        }
    }
  }

  const auto atoms = spec.atoms();
  if (resamples == 0 && atoms.empty()) throw std::invalid_argument("exact Efron-Stein needs finitely many atoms");
  const double floor_t = spec.infimum();
  double total = 0;
  for (std::int32_t e = 0; e < g->num_edges(); ++e) {
    const auto ei = static_cast<std::size_t>(e);
    const auto u = static_cast<std::size_t>(g->tail(e));
    const auto v = static_cast<std::size_t>(g->head(e));
    const double t = field.weight(e);
    const double base = std::min(ds[u] + dd[v], ds[v] + dd[u]);
    // Neither lowering (the edge cannot beat T) nor raising (no chosen geodesic uses it) moves T.
    if (!on_path[ei] && !(base + floor_t < T)) continue;
    auto updated = [&](double tp) {
      if (tp < t) return std::min(T, base + tp);
      if (tp > t && on_path[ei]) return std::min(without[ei], T + (tp - t));
      return T;
    };
    double acc = 0;
    if (resamples == 0) {
      for (const auto& [a, p] : atoms) acc += p * (updated(a) - T) * (updated(a) - T);
    } else {
      CounterStream rng(mix64(key, lattice_edge_key(r.edge_at(e))));
      for (int j = 0; j < resamples; ++j) {
        const double diff = updated(spec.inverse_cdf(rng.uniform())) - T;
        acc += diff * diff;
      }
      acc /= resamples;
    }
    total += acc;
  }
  return {0.5 * total, spec.second_moment() * static_cast<double>(result.g_intersection.size())};
}

std::int64_t max_geodesic_window_count(const PassageResult& result, const Site& center, int m) {
  const Region& r = result.window();
  const auto g = graph_for(r);
  const auto& ds = result.d_src;
  auto before = [&](std::int32_t a, std::int32_t b) {
    const double da = ds[static_cast<std::size_t>(a)], db = ds[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  };
  auto inside = [&](std::int32_t v) { return l1_norm(r.site_at(v) - center) <= m; };
  struct Arc {
    std::int32_t tail, head;
    int gain;
  };
  std::vector<Arc> arcs;
  for (std::int64_t e : result.geodesic_dag) {
    std::int32_t a = g->tail(static_cast<std::int32_t>(e)), b = g->head(static_cast<std::int32_t>(e));
    if (before(b, a)) std::swap(a, b);
    arcs.push_back({a, b, inside(a) && inside(b) ? 1 : 0});
  }
  std::sort(arcs.begin(), arcs.end(), [&](const Arc& x, const Arc& y) { return before(x.tail, y.tail); });
  std::vector<std::int64_t> best(static_cast<std::size_t>(g->num_sites()), -1);
  const auto src = static_cast<std::size_t>(r.site_index(result.src));
  const auto dst = static_cast<std::size_t>(r.site_index(result.dst));
  best[src] = 0;
  for (const Arc& a : arcs) {
    const auto bt = best[static_cast<std::size_t>(a.tail)];
    if (bt < 0) continue;
    auto& bh = best[static_cast<std::size_t>(a.head)];
    bh = std::max(bh, bt + a.gain);
  }
  return std::max<std::int64_t>(best[dst], 0);
}

// ---- reductions -----------------------------------------------------------

std::uint64_t summary_seed(int n, const std::string& column) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : column) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h, static_cast<std::uint64_t>(n));
}

std::vector<int> record_sizes(const std::vector<ReplicaRecord>& records) {
  std::vector<int> ns;
  for (const auto& r : records) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

std::vector<double> column(const std::vector<ReplicaRecord>& records, int n, double ReplicaRecord::*field) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.n == n) out.push_back(r.*field);
  return out;
}

std::vector<double> column(const std::vector<ReplicaRecord>& records, int n, std::int64_t ReplicaRecord::*field) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.n == n) out.push_back(static_cast<double>(r.*field));
  return out;
}

std::vector<SizeSummary> summarize_column(const std::vector<ReplicaRecord>& records, const std::string& name,
                                          double ReplicaRecord::*field, int resamples) {
  std::vector<SizeSummary> out;
  for (int n : record_sizes(records)) {
    const auto x = column(records, n, field);
    out.push_back({n, summarize(x, resamples, summary_seed(n, name))});
  }
  return out;
}

SublinearityProfile sublinearity_profile(const std::vector<SizeSummary>& var_by_n) {
  if (var_by_n.size() < 3) throw std::invalid_argument("sublinearity profile needs at least three sizes");
  SublinearityProfile p;
  double num = 0, den = 0;
  for (const auto& [n, s] : var_by_n) {
    const double ln = std::log(static_cast<double>(n));
    p.rows.push_back({n, s.variance, s.variance_ci, s.variance / n, s.variance * ln / n});
    num += s.variance * ln;
    den += ln * ln;
  }
  p.var_over_n_nonincreasing = true;
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    const auto& a = p.rows[i - 1];
    const auto& b = p.rows[i];
    const Interval ia{a.var_ci.lo / a.n, a.var_ci.hi / a.n};
    const Interval ib{b.var_ci.lo / b.n, b.var_ci.hi / b.n};
    if (b.var_over_n > a.var_over_n && !ia.overlaps(ib)) p.var_over_n_nonincreasing = false;
  }
  p.log_coeff = den > 0 ? num / den : 0;
  p.log_lower_flag = p.log_coeff > 0;
  return p;
}

InfluenceMap influence_map(const std::vector<ReplicaRecord>& records, int n, int d, int resamples) {
  const Region torus = Region::torus(d, n);
  std::vector<const ReplicaRecord*> reps;
  for (const auto& r : records)
    if (r.n == n) reps.push_back(&r);
  if (reps.empty()) throw std::invalid_argument("influence map needs at least one replica");
  InfluenceMap map;
  map.n = n;
  map.replicas = static_cast<int>(reps.size());
  const auto ne = static_cast<std::size_t>(torus.num_edges());
  const std::int64_t per_axis = torus.num_edges() / d;

  auto chi2_by_axis = [&](const std::vector<double>& counts) {
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    for (int a = 0; a < d; ++a) {
      double sum = 0;
      for (std::int64_t e = 0; e < torus.num_edges(); ++e)
        if (torus.edge_at(e).axis == a) sum += counts[static_cast<std::size_t>(e)];
      const double mean = sum / static_cast<double>(per_axis);
      if (mean == 0) continue;
      double chi = 0;
      for (std::int64_t e = 0; e < torus.num_edges(); ++e)
        if (torus.edge_at(e).axis == a) {
          const double dlt = counts[static_cast<std::size_t>(e)] - mean;
          chi += dlt * dlt / mean;
        }
      out[static_cast<std::size_t>(a)] = chi;
    }
    return out;
  };

  std::vector<double> counts(ne, 0.0);
  double g_total = 0;
  for (const auto* r : reps) {
    for (std::int64_t e : r->g_edges) counts[static_cast<std::size_t>(e)] += 1;
    g_total += static_cast<double>(r->g_edges.size());
  }
  map.freq.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) map.freq[e] = counts[e] / map.replicas;
  map.mean_g = g_total / map.replicas;
  map.max_freq = *std::max_element(map.freq.begin(), map.freq.end());
  const auto observed = chi2_by_axis(counts);

  std::vector<int> exceed(static_cast<std::size_t>(d), 0);
  CounterStream rng(summary_seed(n, "influence"));
  std::vector<double> shuffled(ne);
  for (int b = 0; b < resamples; ++b) {
    std::fill(shuffled.begin(), shuffled.end(), 0.0);
    for (const auto* r : reps) {
      Site shift = Site::origin(d);
      for (int i = 0; i < d; ++i) shift[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      for (std::int64_t e : r->g_edges) {
        EdgeId id = torus.edge_at(e);
        id.base = torus.wrap(id.base + shift);
        shuffled[static_cast<std::size_t>(torus.edge_index(id))] += 1;
      }
    }
    const auto chi = chi2_by_axis(shuffled);
    for (int a = 0; a < d; ++a)
      if (chi[static_cast<std::size_t>(a)] >= observed[static_cast<std::size_t>(a)]) ++exceed[static_cast<std::size_t>(a)];
  }
  for (int a = 0; a < d; ++a) {
    AxisUniformity u;
    u.axis = a;
    u.edges = static_cast<int>(per_axis);
    u.chi2 = observed[static_cast<std::size_t>(a)];
    u.dof = static_cast<double>(per_axis - 1);
    u.p_asymptotic = chi_square_sf(u.chi2, u.dof);
    u.p_randomization = (1.0 + exceed[static_cast<std::size_t>(a)]) / (1.0 + resamples);
    map.axes.push_back(u);
  }
  return map;
}

std::vector<WindowRatioRow> geodesic_window_stats(const std::vector<ReplicaRecord>& records) {
  std::vector<WindowRatioRow> out;
  for (int n : record_sizes(records))
    for (std::size_t k = 0; k < kWindowRadii.size(); ++k) {
      std::vector<double> x;
      for (const auto& r : records)
        if (r.n == n && !std::isnan(r.window_counts[k])) x.push_back(r.window_counts[k]);
      if (x.empty()) continue;
      const int m = kWindowRadii[k];
      const double mean = sample_mean(x);
      out.push_back({n, m, mean, mean / (2.0 * m)});
    }
  return out;
}

AnimalWeightStats animal_weight_stats(const std::vector<ReplicaRecord>& records) {
  AnimalWeightStats s;
  double lo = INFINITY, hi = 0, glo = INFINITY, ghi = 0;
  for (int n : record_sizes(records)) {
    const auto y = column(records, n, &ReplicaRecord::Y_n);
    const auto g = column(records, n, &ReplicaRecord::g_int_size);
    AnimalWeightRow row{n, sample_mean(y) / n, sample_mean(g) / n};
    lo = std::min(lo, row.mean_y_over_n);
    hi = std::max(hi, row.mean_y_over_n);
    glo = std::min(glo, row.mean_g_over_n);
    ghi = std::max(ghi, row.mean_g_over_n);
    s.rows.push_back(row);
  }
  s.bounded_within_3 = !s.rows.empty() && hi <= 3 * lo && ghi <= 3 * glo;
  return s;
}

TailProfile tail_profile(const std::vector<double>& values, int n, std::size_t min_replicas) {
  if (values.size() < min_replicas)
    throw std::invalid_argument("tail profile needs at least " + std::to_string(min_replicas) + " replicas");
  if (n < 2) throw std::invalid_argument("tail profile needs n >= 2");
  TailProfile p;
  p.n = n;
  const double mean = sample_mean(values);
  const double scale = std::sqrt(n / std::log(static_cast<double>(n)));
  const double N = static_cast<double>(values.size());
  for (int k = 0; k <= 16; ++k) {
    const double lambda = 0.5 * k;
    std::int64_t lower = 0, two = 0;
    for (double v : values) {
      lower += (v - mean <= -lambda * scale);
      two += (std::abs(v - mean) >= lambda * scale);
    }
    if (lower < 5) break;
    p.rows.push_back({lambda, lower / N, two / N, lower});
  }
  p.decreasing = p.rows.size() >= 2;
  for (std::size_t i = 1; i < p.rows.size(); ++i)
    if (p.rows[i].p_lower > p.rows[i - 1].p_lower) p.decreasing = false;
  if (p.rows.size() >= 2 && !(p.rows.back().p_lower < p.rows.front().p_lower)) p.decreasing = false;
  return p;
}

FnComparison compare_fn_variance(const std::vector<ReplicaRecord>& records) {
  FnComparison c;
  for (int n : record_sizes(records)) {
    const auto T = column(records, n, &ReplicaRecord::T);
    const auto F = column(records, n, &ReplicaRecord::F_n);
    if (std::any_of(F.begin(), F.end(), [](double v) { return std::isnan(v); })) continue;
    FnRow row;
    row.n = n;
    row.var_T = sample_variance(T);
    row.var_F = sample_variance(F);
    row.diff = std::abs(row.var_T - row.var_F);
    row.n34 = std::pow(static_cast<double>(n), 0.75);
    row.ratio = row.diff / row.n34;
    c.rows.push_back(row);
  }
  if (!c.rows.empty()) {
    double worst = 0;
    for (const auto& r : c.rows) worst = std::max(worst, r.ratio);
    c.bounded = worst <= 3 * c.rows.front().ratio || worst == 0;
  }
  return c;
}

SpeedStats geodesic_speed_stats(const std::vector<ReplicaRecord>& records) {
  SpeedStats s;
  for (int n : record_sizes(records)) {
    double lo = INFINITY, sum = 0;
    int count = 0;
    for (const auto& r : records)
      if (r.n == n && r.geo_len > 0) {
        const double q = r.T / static_cast<double>(r.geo_len);
        lo = std::min(lo, q);
        sum += q;
        ++count;
      }
    if (count) s.rows.push_back({n, lo, sum / count});
  }
  s.stabilizes_above_zero = !s.rows.empty() && s.rows.back().min_ratio > 0 &&
                            s.rows.back().min_ratio >= 0.5 * s.rows.front().min_ratio;
  return s;
}

std::vector<EsRow> efron_stein_rows(const std::vector<ReplicaRecord>& records, int resamples) {
  std::vector<EsRow> out;
  for (int n : record_sizes(records)) {
    const auto b = column(records, n, &ReplicaRecord::es_bound);
    if (b.empty() || std::any_of(b.begin(), b.end(), [](double v) { return std::isnan(v); })) continue;
    EsRow row;
    row.n = n;
    row.bound = summarize(b, resamples, summary_seed(n, "es_bound"));
    row.relaxation = summarize(column(records, n, &ReplicaRecord::es_relaxation), resamples, summary_seed(n, "es_relax"));
    row.T = summarize(column(records, n, &ReplicaRecord::T), resamples, summary_seed(n, "T"));
    const double slack = 2 * std::hypot(row.bound.mean_ci.half_width(), row.T.variance_ci.half_width());
    row.holds = row.bound.mean >= row.T.variance - slack;
    out.push_back(row);
  }
  return out;
}

}  // namespace fpplab
