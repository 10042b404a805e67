#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fpplab/fpp.hpp"
#include "fpplab/stats.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

enum class Model { FppPoint, FppTorus, Lpp };

std::string to_string(Model m);
/// "fpp-point", "fpp-torus" or "lpp"; throws std::invalid_argument otherwise.
Model parse_model(const std::string& text);

struct SweepConfig {
  Model model = Model::FppPoint;
  int d = 2;
  std::vector<int> n_list;
  DistributionSpec spec{Uniform{0, 1}};
  int replicas = 100;
  std::uint64_t seed = 1;
  /// Window margin w = max(m, ceil(kappa n)).
  double kappa = 0.5;
  int max_grows = 4;
  int bootstrap = kDefaultBootstrap;
  int dyadic_bits = kDyadicDepth;
  /// Also compute the averaged passage time F_n.
  bool fn = false;
  /// Also estimate the Efron-Stein bound per replica.
  bool efron_stein = false;
  /// Resamples per edge for the Efron-Stein estimate; 0 takes the exact
  /// expectation over the atoms of a finitely atomic law.
  int es_resamples = 4;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// Per-replica master seed mix64(mix64(seed, n), replica).
std::uint64_t replica_seed(std::uint64_t sweep_seed, int n, int replica);

inline constexpr std::array<int, 3> kWindowRadii{2, 4, 8};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicaRecord {
  int n = 0;
  int replica = 0;
  double T = kNaN;
  double F_n = kNaN;
  std::int64_t g_dag_size = 0;
  std::int64_t g_int_size = 0;
  std::int64_t geo_len = 0;
  double geo_diam = kNaN;
  double transverse_dev = kNaN;
  double Y_n = kNaN;
  int window_grows = 0;
  bool boundary_contact = false;
  /// max over geodesics of #(gamma inside z + B_m), m in kWindowRadii, with z the
  /// first site of the sampled geodesic on the hyperplane x_0 = floor(n/2).
  std::array<double, 3> window_counts{kNaN, kNaN, kNaN};
  /// (1/2) sum_e E[(T - T^(e))^2] estimated on this replica.
  double es_bound = kNaN;
  /// E[t^2] #G_n.
  double es_relaxation = kNaN;
  /// Torus only: sorted torus edge indices in G.
  std::vector<std::int64_t> g_edges;

};

ReplicaRecord run_replica(const SweepConfig& config, int n, int replica);

/// Records ordered by (n in n_list order, replica), computed by an OpenMP
/// worker pool; threads <= 0 uses the OpenMP default.
std::vector<ReplicaRecord> run_sweep(const SweepConfig& config, int threads = 0);

/// Reference implementation: one thread, plain loop, same output.
std::vector<ReplicaRecord> run_sweep_serial(const SweepConfig& config);

/// Box window for point-to-point passage at size n under the config's policy.
Region sweep_window(const SweepConfig& config, int n);

struct EfronSteinEstimate {
  double bound = 0;
  double relaxation = 0;
};

/// (1/2) sum over window edges of E[(T - T with t_e resampled)^2], by
/// single-edge updates from the distance fields and replacement paths.
EfronSteinEstimate efron_stein_bound(const PassageResult& result, const DistributionSpec& spec, int resamples,
                                     std::uint64_t key);

/// Largest number of edges inside z + B_m over all geodesics of the result.
std::int64_t max_geodesic_window_count(const PassageResult& result, const Site& center, int m);

// ---- reductions -----------------------------------------------------------

/// Bootstrap seed for a column of records at size n, so summaries depend on
/// the records alone.
std::uint64_t summary_seed(int n, const std::string& column);

std::vector<int> record_sizes(const std::vector<ReplicaRecord>& records);
std::vector<double> column(const std::vector<ReplicaRecord>& records, int n, double ReplicaRecord::*field);
std::vector<double> column(const std::vector<ReplicaRecord>& records, int n, std::int64_t ReplicaRecord::*field);

struct SizeSummary {
  int n = 0;
  EstimatorSummary summary;
};

/// Summary of one column per n, in increasing n.
std::vector<SizeSummary> summarize_column(const std::vector<ReplicaRecord>& records, const std::string& name,
                                          double ReplicaRecord::*field, int resamples);

struct SublinearityRow {
  int n = 0;
  double var = 0;
  Interval var_ci;
  double var_over_n = 0;
  double var_log_over_n = 0;
};

struct SublinearityProfile {
  std::vector<SublinearityRow> rows;
  /// Var/n does not increase between consecutive n, or the scaled CIs overlap.
  bool var_over_n_nonincreasing = false;
  /// Least-squares c in Var ~ c log n.
  double log_coeff = 0;
  bool log_lower_flag = false;
};

SublinearityProfile sublinearity_profile(const std::vector<SizeSummary>& var_by_n);

struct AxisUniformity {
  int axis = 0;
  int edges = 0;
  double chi2 = 0;
  double dof = 0;
  double p_asymptotic = 1;
  /// Randomization p-value: each replica's G is translated by an independent
  /// uniform torus shift, which leaves the law invariant under the null.
  double p_randomization = 1;
};

struct InfluenceMap {
  int n = 0;
  int replicas = 0;
  std::vector<double> freq;
  double mean_g = 0;
  double max_freq = 0;
  std::vector<AxisUniformity> axes;
};

InfluenceMap influence_map(const std::vector<ReplicaRecord>& records, int n, int d, int resamples = 199);

struct WindowRatioRow {
  int n = 0;
  int m = 0;
  double mean_count = 0;
  /// mean_count / diam(B_m) with diam = 2m.
  double ratio = 0;
};

std::vector<WindowRatioRow> geodesic_window_stats(const std::vector<ReplicaRecord>& records);

struct AnimalWeightRow {
  int n = 0;
  double mean_y_over_n = 0;
  double mean_g_over_n = 0;
};

struct AnimalWeightStats {
  std::vector<AnimalWeightRow> rows;
  bool bounded_within_3 = false;
};

AnimalWeightStats animal_weight_stats(const std::vector<ReplicaRecord>& records);

struct TailRow {
  double lambda = 0;
  double p_lower = 0;
  double p_two_sided = 0;
  std::int64_t lower_count = 0;
};

struct TailProfile {
  int n = 0;
  std::vector<TailRow> rows;
  bool decreasing = false;
};

/// Lambda grid {0, 0.5, ..., 8}, truncated once fewer than 5 lower exceedances remain.
TailProfile tail_profile(const std::vector<double>& values, int n, std::size_t min_replicas = 1000);

struct FnRow {
  int n = 0;
  double var_T = 0;
  double var_F = 0;
  double diff = 0;
  double n34 = 0;
  double ratio = 0;
};

struct FnComparison {
  std::vector<FnRow> rows;
  /// max ratio <= 3 x the ratio at the smallest n.
  bool bounded = false;
};

FnComparison compare_fn_variance(const std::vector<ReplicaRecord>& records);

struct SpeedRow {
  int n = 0;
  double min_ratio = 0;
  double mean_ratio = 0;
};

struct SpeedStats {
  std::vector<SpeedRow> rows;
  bool stabilizes_above_zero = false;
};

SpeedStats geodesic_speed_stats(const std::vector<ReplicaRecord>& records);

struct EsRow {
  int n = 0;
  EstimatorSummary bound;
  EstimatorSummary relaxation;
  EstimatorSummary T;
  /// bound >= Var - 2 sqrt(hw_bound^2 + hw_var^2).
  bool holds = false;
};

std::vector<EsRow> efron_stein_rows(const std::vector<ReplicaRecord>& records, int resamples);

}  // namespace fpplab
