#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fpplab/estimators.hpp"
#include "fpplab/ineqlab.hpp"

namespace fpplab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Fixed column order per model; the header row is always written.
std::vector<std::string> csv_columns(Model model);

/// Floats use the shortest round-trip decimal, NaN is written as "nan".
void write_records_csv(std::ostream& out, Model model, const std::vector<ReplicaRecord>& records);
std::string records_csv(Model model, const std::vector<ReplicaRecord>& records);
/// Throws std::runtime_error on a header that does not match the model.
std::vector<ReplicaRecord> read_records_csv(std::istream& in, Model model);

/// Summary JSON of a sweep, a pure function of (config, records).
std::string summary_json(const SweepConfig& config, const std::vector<ReplicaRecord>& records);

/// Declarative plot list: csv path, x column, y column, scale, reference curve.
std::string plot_manifest(const SweepConfig& config);

/// Per-n table backing the summary plots (n, mean_T, var_T, ...).
std::string summary_table_csv(const SweepConfig& config, const std::vector<ReplicaRecord>& records);

/// JSON report of inequality suites, one entry per check.
std::string ineq_report_json(const std::vector<ineq::SuiteSummary>& suites, std::uint64_t seed);

/// Directory layout:
///   config.txt                    serialized config
///   records/<model>_n<n>.csv      one file per size
///   summary.json, summary_by_n.csv, plots.txt
///   manifest.json                 digest, seed, version, timestamps, counts, paths
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path records_path(Model model, int n) const;

  /// Writes config and records. Refuses (std::runtime_error) to replace records
  /// that came from a config with a different digest.
  void write_sweep(const SweepConfig& config, const std::vector<ReplicaRecord>& records) const;

  SweepConfig load_config() const;
  std::vector<ReplicaRecord> load_records(const SweepConfig& config) const;

  /// Regenerates summary.json, summary_by_n.csv and plots.txt from the files
  /// on disk. Throws std::runtime_error on an empty store.
  void emit_report() const;

  /// Timestamps are ISO 8601 UTC strings and appear only here.
  void write_manifest(const SweepConfig& config, const std::string& started, const std::string& finished) const;

 private:
  std::filesystem::path dir_;
};

std::string utc_timestamp();

}  // namespace fpplab
