#include <algorithm>
#include <cmath>
#include <exception>
#include <omp.h>
#include <stdexcept>

#include "fpplab/estimators.hpp"
#include "fpplab/lpp.hpp"
#include "fpplab/rng.hpp"

namespace fpplab {

std::string to_string(Model m) {
  switch (m) {
    case Model::FppPoint:
      return "fpp-point";
    case Model::FppTorus:
      return "fpp-torus";
    case Model::Lpp:
      return "lpp";
  }
  return "?";
}

Model parse_model(const std::string& text) {
  if (text == "fpp-point") return Model::FppPoint;
  if (text == "fpp-torus") return Model::FppTorus;
  if (text == "lpp") return Model::Lpp;
  throw std::invalid_argument("unknown model '" + text + "' (expected fpp-point, fpp-torus or lpp)");
}

void SweepConfig::validate() const {
  if (d < 2 || d > kMaxDim) throw std::invalid_argument("d must lie in [2, 4]");
  if (model == Model::Lpp && d != 2) throw std::invalid_argument("lpp is defined for d = 2 only");
  if (n_list.empty()) throw std::invalid_argument("n list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("n values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("n list must be strictly increasing");
  }
  if (model == Model::FppTorus && n_list.front() < 3) throw std::invalid_argument("torus side must be at least 3");
  if (replicas < 2) throw std::invalid_argument("replicas must be at least 2");
  if (!(kappa >= 0)) throw std::invalid_argument("kappa must be nonnegative");
  if (max_grows < 0) throw std::invalid_argument("max_grows must be nonnegative");
  if (bootstrap < 0) throw std::invalid_argument("bootstrap must be nonnegative");
  if (dyadic_bits < 1 || dyadic_bits > kDyadicDepth) throw std::invalid_argument("dyadic_bits must lie in [1, 53]");
  if (es_resamples < 0) throw std::invalid_argument("es_resamples must be nonnegative");
  if (efron_stein && es_resamples == 0 && spec.atoms().empty())
    throw std::invalid_argument("es_resamples = 0 needs a law with finitely many atoms");
  if ((fn || efron_stein) && model != Model::FppPoint)
    throw std::invalid_argument("fn and efron_stein apply to the fpp-point model");
  if (model != Model::Lpp) check_fpp_admissible(spec, d);
}

std::uint64_t replica_seed(std::uint64_t sweep_seed, int n, int replica) {
  return mix64(mix64(sweep_seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(replica));
}

Region sweep_window(const SweepConfig& config, int n) {
  const int m = fourth_root_ceil(n);
  const int w = std::max(m, static_cast<int>(std::ceil(config.kappa * n)));
  return point_window(n, config.d, std::max(w, 1));
}

namespace {

double l1_diameter(const std::vector<Site>& path, int d) {
  // max |x - y|_1 = max over sign patterns s of (max s.x - min s.x).
  double best = 0;
  for (int mask = 0; mask < (1 << (d - 1)); ++mask) {
    double lo = INFINITY, hi = -INFINITY;
    for (const Site& x : path) {
      double v = x[0];
      for (int i = 1; i < d; ++i) v += ((mask >> (i - 1)) & 1) ? -x[i] : x[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

double transverse_deviation(const std::vector<Site>& path, int d) {
  double best = 0;
  for (const Site& x : path) {
    double t = 0;
    for (int i = 1; i < d; ++i) t += std::abs(x[i]);
    best = std::max(best, t);
  }
  return best;
}

ReplicaRecord point_replica(const SweepConfig& config, int n, int replica) {
  ReplicaRecord rec;
  rec.n = n;
  rec.replica = replica;
  const std::uint64_t seed = replica_seed(config.seed, n, replica);
  auto field = std::make_shared<const WeightField>(
      WeightField::sample(config.spec, sweep_window(config, n), seed, true, config.dyadic_bits));
  PassageOptions opts;
  opts.max_grows = config.max_grows;
  const Site src = Site::origin(config.d);
  const Site dst = Site::unit(config.d, 0, n);
  const auto res = passage_time(field, src, dst, opts);
  rec.T = res.T;
  rec.g_dag_size = static_cast<std::int64_t>(res.geodesic_dag.size());
  rec.g_int_size = static_cast<std::int64_t>(res.g_intersection.size());
  rec.geo_len = static_cast<std::int64_t>(res.sample_path.size()) - 1;
  rec.geo_diam = l1_diameter(res.sample_path, config.d);
  rec.transverse_dev = transverse_deviation(res.sample_path, config.d);
  rec.window_grows = res.window_grows;
  rec.boundary_contact = res.boundary_contact;
  double y = 0;
  for (std::int64_t e : res.g_intersection) y += log_cdf_weight(config.spec, res.field->weight(e));
  rec.Y_n = y;
  // Balls are centered on the sampled geodesic where it first reaches x_0 = floor(n/2).
  Site center = Site::unit(config.d, 0, n / 2);
  for (const Site& x : res.sample_path)
    if (x[0] == n / 2) {
      center = x;
      break;
    }
  for (std::size_t k = 0; k < kWindowRadii.size(); ++k)
    rec.window_counts[k] = static_cast<double>(max_geodesic_window_count(res, center, kWindowRadii[k]));
  if (config.fn) {
    // Same field, on the (possibly grown) window of the point computation.
    const auto avg = averaged_passage(*res.field, n, opts);
    rec.F_n = avg.F;
    rec.window_grows += avg.window_grows;
    rec.boundary_contact = rec.boundary_contact || avg.boundary_contact;
  }
  if (config.efron_stein) {
    const auto es = efron_stein_bound(res, config.spec, config.es_resamples, mix64(seed, 0xE5ULL));
    rec.es_bound = es.bound;
    rec.es_relaxation = es.relaxation;
  }
  return rec;
}

ReplicaRecord torus_replica(const SweepConfig& config, int n, int replica) {
  ReplicaRecord rec;
  rec.n = n;
  rec.replica = replica;
  const std::uint64_t seed = replica_seed(config.seed, n, replica);
  const auto field = WeightField::sample(config.spec, Region::torus(config.d, n), seed, true, config.dyadic_bits);
  TorusOptions opts;
  opts.max_grows = config.max_grows;
  const auto res = torus_passage(field, opts);
  rec.T = res.T;
  rec.g_dag_size = static_cast<std::int64_t>(res.geodesic_dag.size());
  rec.g_int_size = static_cast<std::int64_t>(res.g_intersection.size());
  rec.geo_len = static_cast<std::int64_t>(res.sample_path.size()) - 1;
  rec.window_grows = res.window_grows;
  rec.boundary_contact = res.boundary_contact;
  double y = 0;
  for (std::int64_t e : res.g_intersection) y += log_cdf_weight(config.spec, field.weight(e));
  rec.Y_n = y;
  rec.g_edges = res.g_intersection;
  return rec;
}

ReplicaRecord lpp_replica(const SweepConfig& config, int n, int replica) {
  ReplicaRecord rec;
  rec.n = n;
  rec.replica = replica;
  rec.T = last_passage_sampled(config.spec, n, replica_seed(config.seed, n, replica));
  return rec;
}

}  // namespace

ReplicaRecord run_replica(const SweepConfig& config, int n, int replica) {
  switch (config.model) {
    case Model::FppPoint:
      return point_replica(config, n, replica);
    case Model::FppTorus:
      return torus_replica(config, n, replica);
    case Model::Lpp:
      return lpp_replica(config, n, replica);
  }
  throw std::logic_error("unknown model");
}

std::vector<ReplicaRecord> run_sweep_serial(const SweepConfig& config) {
  config.validate();
  std::vector<ReplicaRecord> out;
  out.reserve(config.n_list.size() * static_cast<std::size_t>(config.replicas));
  for (int n : config.n_list)
    for (int r = 0; r < config.replicas; ++r) out.push_back(run_replica(config, n, r));
  return out;
}

std::vector<ReplicaRecord> run_sweep(const SweepConfig& config, int threads) {
  config.validate();
  const auto per_n = static_cast<std::int64_t>(config.replicas);
  const auto total = static_cast<std::int64_t>(config.n_list.size()) * per_n;
  std::vector<ReplicaRecord> out(static_cast<std::size_t>(total));
  std::exception_ptr failure;
  const int team = threads > 0 ? threads : omp_get_max_threads();
  // Largest n first so the long tasks do not trail at the end; each task writes
  // only its own slot, so the output order is fixed.
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (std::int64_t t = 0; t < total; ++t) {
    const std::int64_t slot = total - 1 - t;
    const auto ni = static_cast<std::size_t>(slot / per_n);
    const auto r = static_cast<int>(slot % per_n);
    try {
      out[static_cast<std::size_t>(slot)] = run_replica(config, config.n_list[ni], r);
    } catch (...) {
#pragma omp critical(fpplab_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace fpplab
