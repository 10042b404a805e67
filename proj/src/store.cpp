#include "fpplab/store.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "fpplab/config.hpp"
#include "fpplab/lpp.hpp"

namespace fpplab {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_real(const std::string& s) {
  if (s == "nan") return kNaN;
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + s + "' in records");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::runtime_error("bad integer '" + s + "' in records");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Interval& i) { return Json::array({num(i.lo), num(i.hi)}); }

Json to_json(const EstimatorSummary& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = num(s.mean);
  j["variance"] = num(s.variance);
  j["mean_ci"] = to_json(s.mean_ci);
  j["mean_ci_half_width"] = num(s.mean_ci.half_width());
  j["variance_ci"] = to_json(s.variance_ci);
  j["variance_ci_half_width"] = num(s.variance_ci.half_width());
  return j;
}

Json to_json(const FitResult& f) {
  Json j;
  j["points"] = f.points;
  j["chi_hat"] = num(f.chi_hat);
  j["chi_stderr"] = num(f.chi_stderr);
  j["nu_hat"] = num(f.nu_hat);
  j["sigma_hat"] = num(f.sigma_hat);
  Json r = Json::array();
  for (double x : f.residuals) r.push_back(num(x));
  j["residuals"] = r;
  return j;
}

Json column_json(const std::vector<SizeSummary>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    Json k;
    k["n"] = r.n;
    const Json s = to_json(r.summary);
    for (const auto& [key, v] : s.items()) k[key] = v;
    a.push_back(k);
  }
  return a;
}

// Var(T_n) fit plus a time constant from the slope of mean T_n against n.
Json chi_fit_json(const std::vector<SizeSummary>& T, double nu_override = kNaN) {
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> ns, means;
  for (const auto& r : T) {
    pairs.emplace_back(r.n, r.summary.variance);
    ns.push_back(r.n);
    means.push_back(r.summary.mean);
  }
  try {
    FitResult f = fit_chi(pairs);
    f.nu_hat = std::isnan(nu_override) ? ols(ns, means).slope : nu_override;
    return to_json(f);
  } catch (const std::invalid_argument&) {
    return nullptr;
  }
}

std::vector<SizeSummary> summarize_int(const std::vector<ReplicaRecord>& records, const std::string& name,
                                       std::int64_t ReplicaRecord::*field, int resamples) {
  std::vector<SizeSummary> out;
  for (int n : record_sizes(records)) out.push_back({n, summarize(column(records, n, field), resamples, summary_seed(n, name))});
  return out;
}

std::vector<double> rescaled(const std::vector<double>& T, int n, double center) {
  std::vector<double> z;
  for (double t : T) z.push_back(rescaled_statistic(t, n, center));
  return z;
}

}  // namespace

std::vector<std::string> csv_columns(Model model) {
  switch (model) {
    case Model::FppPoint:
      return {"n",         "replica", "T",      "F_n",          "g_dag_size",       "g_int_size",
              "geo_len",   "geo_diam", "transverse_dev", "Y_n", "window_grows",     "boundary_contact",
              "win_m2",    "win_m4",  "win_m8", "es_bound",     "es_relaxation"};
    case Model::FppTorus:
      return {"n", "replica", "T", "g_dag_size", "g_int_size", "geo_len", "Y_n", "window_grows", "boundary_contact",
              "g_edges"};
    case Model::Lpp:
      return {"n", "replica", "T"};
  }
  return {};
}

void write_records_csv(std::ostream& out, Model model, const std::vector<ReplicaRecord>& records) {
  out << join(csv_columns(model), ',') << '\n';
  for (const auto& r : records) {
    std::vector<std::string> f{std::to_string(r.n), std::to_string(r.replica), fmt(r.T)};
    if (model == Model::FppPoint) {
      f.insert(f.end(), {fmt(r.F_n), std::to_string(r.g_dag_size), std::to_string(r.g_int_size),
                         std::to_string(r.geo_len), fmt(r.geo_diam), fmt(r.transverse_dev), fmt(r.Y_n),
                         std::to_string(r.window_grows), r.boundary_contact ? "1" : "0", fmt(r.window_counts[0]),
                         fmt(r.window_counts[1]), fmt(r.window_counts[2]), fmt(r.es_bound), fmt(r.es_relaxation)});
    } else if (model == Model::FppTorus) {
      std::vector<std::string> edges;
      for (auto e : r.g_edges) edges.push_back(std::to_string(e));
      f.insert(f.end(), {std::to_string(r.g_dag_size), std::to_string(r.g_int_size), std::to_string(r.geo_len),
                         fmt(r.Y_n), std::to_string(r.window_grows), r.boundary_contact ? "1" : "0", join(edges, ' ')});
    }
    out << join(f, ',') << '\n';
  }
}

std::string records_csv(Model model, const std::vector<ReplicaRecord>& records) {
  std::ostringstream ss;
  write_records_csv(ss, model, records);
  return ss.str();
}

std::vector<ReplicaRecord> read_records_csv(std::istream& in, Model model) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records file is empty");
  const auto cols = csv_columns(model);
  if (split(line, ',') != cols) throw std::runtime_error("records header does not match model " + to_string(model));
  std::vector<ReplicaRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != cols.size()) throw std::runtime_error("records row has " + std::to_string(f.size()) + " fields");
    ReplicaRecord r;
    r.n = static_cast<int>(parse_int(f[0]));
    r.replica = static_cast<int>(parse_int(f[1]));
    r.T = parse_real(f[2]);
    if (model == Model::FppPoint) {
      r.F_n = parse_real(f[3]);
      r.g_dag_size = parse_int(f[4]);
      r.g_int_size = parse_int(f[5]);
      r.geo_len = parse_int(f[6]);
      r.geo_diam = parse_real(f[7]);
      r.transverse_dev = parse_real(f[8]);
      r.Y_n = parse_real(f[9]);
      r.window_grows = static_cast<int>(parse_int(f[10]));
      r.boundary_contact = f[11] == "1";
      for (std::size_t k = 0; k < 3; ++k) r.window_counts[k] = parse_real(f[12 + k]);
      r.es_bound = parse_real(f[15]);
      r.es_relaxation = parse_real(f[16]);
    } else if (model == Model::FppTorus) {
      r.g_dag_size = parse_int(f[3]);
      r.g_int_size = parse_int(f[4]);
      r.geo_len = parse_int(f[5]);
      r.Y_n = parse_real(f[6]);
      r.window_grows = static_cast<int>(parse_int(f[7]));
      r.boundary_contact = f[8] == "1";
      if (!f[9].empty())
        for (const auto& e : split(f[9], ' ')) r.g_edges.push_back(parse_int(e));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_json(const SweepConfig& config, const std::vector<ReplicaRecord>& records) {
  if (records.empty()) throw std::runtime_error("no records to summarize");
  const int B = config.bootstrap;
  Json j;
  j["tool_version"] = kToolVersion;
  j["config_digest"] = config_digest(config);
  j["model"] = to_string(config.model);
  j["d"] = config.d;
  j["dist"] = config.spec.to_string();
  j["seed"] = config.seed;
  j["sizes"] = record_sizes(records);

  const auto T = summarize_column(records, "T", &ReplicaRecord::T, B);
  Json cols;
  cols["T"] = column_json(T);

  if (config.model == Model::Lpp) {
    std::vector<int> ns;
    std::vector<double> means;
    for (const auto& r : T) {
      ns.push_back(r.n);
      means.push_back(r.summary.mean);
    }
    const double center = ns.size() >= 2 ? fit_lpp_center(ns, means) : kNaN;
    j["columns"] = cols;
    j["fit_chi"] = chi_fit_json(T, center);
    j["center_fit"] = num(center);
    j["center_reference"] = kJohanssonCenter;
    Json z = Json::array();
    for (const auto& r : T) {
      const auto t = column(records, r.n, &ReplicaRecord::T);
      Json row;
      row["n"] = r.n;
      for (const auto& [name, c] : {std::pair<const char*, double>{"fitted", center}, {"reference", kJohanssonCenter}}) {
        if (std::isnan(c)) continue;
        const auto zs = rescaled(t, r.n, c);
        row[std::string("mean_z_") + name] = num(sample_mean(zs));
        row[std::string("var_z_") + name] = num(sample_variance(zs));
      }
      z.push_back(row);
    }
    j["rescaled"] = z;
    Json ks = Json::array();
    for (std::size_t i = 0; i + 1 < T.size() && !std::isnan(center); ++i) {
      const auto a = rescaled(column(records, T[i].n, &ReplicaRecord::T), T[i].n, center);
      const auto b = rescaled(column(records, T[i + 1].n, &ReplicaRecord::T), T[i + 1].n, center);
      const auto r = ks_two_sample(a, b);
      ks.push_back({{"n", T[i].n}, {"n_next", T[i + 1].n}, {"statistic", num(r.statistic)}, {"p_value", num(r.p_value)}});
    }
    j["ks_consecutive"] = ks;
    return j.dump(2) + "\n";
  }

  cols["g_int_size"] = column_json(summarize_int(records, "g_int_size", &ReplicaRecord::g_int_size, B));
  cols["g_dag_size"] = column_json(summarize_int(records, "g_dag_size", &ReplicaRecord::g_dag_size, B));
  cols["geo_len"] = column_json(summarize_int(records, "geo_len", &ReplicaRecord::geo_len, B));
  cols["Y_n"] = column_json(summarize_column(records, "Y_n", &ReplicaRecord::Y_n, B));
  if (config.fn) cols["F_n"] = column_json(summarize_column(records, "F_n", &ReplicaRecord::F_n, B));
  j["columns"] = cols;
  j["fit_chi"] = chi_fit_json(T);

  Json contact = Json::array();
  for (int n : record_sizes(records)) {
    std::int64_t c = 0, g = 0;
    for (const auto& r : records)
      if (r.n == n) {
        c += r.boundary_contact;
        g += r.window_grows;
      }
    contact.push_back({{"n", n}, {"boundary_contact", c}, {"window_grows", g}});
  }
  j["window"] = contact;

  if (T.size() >= 3) {
    const auto p = sublinearity_profile(T);
    Json rows = Json::array();
    for (const auto& r : p.rows)
      rows.push_back({{"n", r.n},
                      {"var", num(r.var)},
                      {"var_ci", to_json(r.var_ci)},
                      {"var_over_n", num(r.var_over_n)},
                      {"var_log_over_n", num(r.var_log_over_n)}});
    j["sublinearity"] = {{"rows", rows},
                         {"var_over_n_nonincreasing", p.var_over_n_nonincreasing},
                         {"log_coeff", num(p.log_coeff)},
                         {"log_lower_flag", p.log_lower_flag}};
  }

  const auto animal = animal_weight_stats(records);
  Json arows = Json::array();
  for (const auto& r : animal.rows)
    arows.push_back({{"n", r.n}, {"mean_y_over_n", num(r.mean_y_over_n)}, {"mean_g_over_n", num(r.mean_g_over_n)}});
  j["animal_weights"] = {{"rows", arows}, {"bounded_within_3", animal.bounded_within_3}};

  if (config.model == Model::FppTorus) {
    Json inf = Json::array();
    for (int n : record_sizes(records)) {
      const auto m = influence_map(records, n, config.d);
      Json axes = Json::array();
      for (const auto& a : m.axes)
        axes.push_back({{"axis", a.axis},
                        {"edges", a.edges},
                        {"chi2", num(a.chi2)},
                        {"dof", num(a.dof)},
                        {"p_asymptotic", num(a.p_asymptotic)},
                        {"p_randomization", num(a.p_randomization)}});
      Json freq = Json::array();
      for (double f : m.freq) freq.push_back(num(f));
      inf.push_back({{"n", n},
                     {"replicas", m.replicas},
                     {"mean_g", num(m.mean_g)},
                     {"max_freq", num(m.max_freq)},
                     {"axes", axes},
                     {"freq", freq}});
    }
    j["influence"] = inf;
    return j.dump(2) + "\n";
  }

  Json win = Json::array();
  for (const auto& r : geodesic_window_stats(records))
    win.push_back({{"n", r.n}, {"m", r.m}, {"mean_count", num(r.mean_count)}, {"ratio", num(r.ratio)}});
  j["window_ratios"] = win;

  const auto speed = geodesic_speed_stats(records);
  Json srows = Json::array();
  for (const auto& r : speed.rows) srows.push_back({{"n", r.n}, {"min_ratio", num(r.min_ratio)}, {"mean_ratio", num(r.mean_ratio)}});
  j["speed"] = {{"rows", srows}, {"stabilizes_above_zero", speed.stabilizes_above_zero}};

  if (config.efron_stein) {
    Json es = Json::array();
    for (const auto& r : efron_stein_rows(records, B))
      es.push_back({{"n", r.n},
                    {"bound", to_json(r.bound)},
                    {"relaxation", to_json(r.relaxation)},
                    {"var_T", num(r.T.variance)},
                    {"var_T_ci", to_json(r.T.variance_ci)},
                    {"holds", r.holds}});
    j["efron_stein"] = es;
  }
  if (config.fn) {
    const auto c = compare_fn_variance(records);
    Json rows = Json::array();
    for (const auto& r : c.rows)
      rows.push_back({{"n", r.n},
                      {"var_T", num(r.var_T)},
                      {"var_F", num(r.var_F)},
                      {"diff", num(r.diff)},
                      {"n34", num(r.n34)},
                      {"ratio", num(r.ratio)}});
    j["fn_comparison"] = {{"rows", rows}, {"bounded", c.bounded}};
  }
  Json tails = Json::array();
  for (int n : record_sizes(records)) {
    const auto t = column(records, n, &ReplicaRecord::T);
    if (t.size() < 1000 || n < 2) continue;
    const auto p = tail_profile(t, n);
    Json rows = Json::array();
    for (const auto& r : p.rows)
      rows.push_back({{"lambda", r.lambda},
                      {"p_lower", num(r.p_lower)},
                      {"p_two_sided", num(r.p_two_sided)},
                      {"lower_count", r.lower_count}});
    tails.push_back({{"n", n}, {"rows", rows}, {"decreasing", p.decreasing}});
  }
  j["tail_profiles"] = tails;
  return j.dump(2) + "\n";
}

std::string summary_table_csv(const SweepConfig& config, const std::vector<ReplicaRecord>& records) {
  const int B = config.bootstrap;
  const auto T = summarize_column(records, "T", &ReplicaRecord::T, B);
  std::vector<std::string> head{"n", "count", "mean_T", "var_T", "var_T_lo", "var_T_hi", "var_over_n", "var_log_over_n"};
  const bool fpp = config.model != Model::Lpp;
  if (fpp) head.insert(head.end(), {"mean_g_int_over_n", "mean_y_over_n"});
  if (config.fn) head.insert(head.end(), {"var_F", "fn_ratio"});
  std::string out = join(head, ',') + "\n";
  const auto fn = config.fn ? compare_fn_variance(records) : FnComparison{};
  for (const auto& r : T) {
    const double n = r.n;
    std::vector<std::string> f{std::to_string(r.n), std::to_string(r.summary.count), fmt(r.summary.mean),
                               fmt(r.summary.variance), fmt(r.summary.variance_ci.lo), fmt(r.summary.variance_ci.hi),
                               fmt(r.summary.variance / n), fmt(r.summary.variance * std::log(n) / n)};
    if (fpp) {
      f.push_back(fmt(sample_mean(column(records, r.n, &ReplicaRecord::g_int_size)) / n));
      f.push_back(fmt(sample_mean(column(records, r.n, &ReplicaRecord::Y_n)) / n));
    }
    if (config.fn) {
      double vf = kNaN, ratio = kNaN;
      for (const auto& row : fn.rows)
        if (row.n == r.n) {
          vf = row.var_F;
          ratio = row.ratio;
        }
      f.push_back(fmt(vf));
      f.push_back(fmt(ratio));
    }
    out += join(f, ',') + "\n";
  }
  return out;
}

std::string plot_manifest(const SweepConfig& config) {
  std::string out = "# csv | x | y | scale | reference curves\n";
  auto line = [&](const std::string& csv, const std::string& x, const std::string& y, const std::string& scale,
                  const std::string& ref) { out += csv + " | " + x + " | " + y + " | " + scale + " | " + ref + "\n"; };
  line("summary_by_n.csv", "n", "var_T", "loglog", "c*n^(2/3); c*n");
  line("summary_by_n.csv", "n", "var_over_n", "loglog", "c; c/log(n)");
  line("summary_by_n.csv", "n", "var_log_over_n", "semilogx", "c");
  if (config.model != Model::Lpp) {
    line("summary_by_n.csv", "n", "mean_g_int_over_n", "semilogx", "c");
    line("summary_by_n.csv", "n", "mean_y_over_n", "semilogx", "c");
  }
  if (config.fn) line("summary_by_n.csv", "n", "fn_ratio", "semilogx", "c");
  for (int n : config.n_list) {
    const std::string csv = "records/" + to_string(config.model) + "_n" + std::to_string(n) + ".csv";
    line(csv, "replica", "T", "histogram", config.model == Model::Lpp ? "4*n" : "none");
  }
  return out;
}

std::string ineq_report_json(const std::vector<ineq::SuiteSummary>& suites, std::uint64_t seed) {
  Json j;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed;
  Json checks = Json::array();
  bool all = true;
  for (const auto& s : suites) {
    checks.push_back({{"check", s.check},
                      {"instances", s.instances},
                      {"violations", s.violations},
                      {"equalities", s.equalities},
                      {"vacuous", s.vacuous},
                      {"margin", num(s.min_margin)},
                      {"worst_digest", s.worst_digest},
                      {"holds", s.passed()}});
    all = all && s.passed();
  }
  j["checks"] = checks;
  j["all_hold"] = all;
  return j.dump(2) + "\n";
}

std::filesystem::path ResultStore::records_path(Model model, int n) const {
  return dir_ / "records" / (to_string(model) + "_n" + std::to_string(n) + ".csv");
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void ResultStore::write_sweep(const SweepConfig& config, const std::vector<ReplicaRecord>& records) const {
  std::filesystem::create_directories(dir_ / "records");
  const auto cfg_path = dir_ / "config.txt";
  if (std::filesystem::exists(cfg_path)) {
    const auto old = parse_config(read_file(cfg_path), cfg_path.string());
    if (config_digest(old) != config_digest(config))
      throw std::runtime_error("store " + dir_.string() + " holds records of a different config");
  }
  write_file(cfg_path, serialize_config(config));
  for (int n : config.n_list) {
    std::vector<ReplicaRecord> part;
    for (const auto& r : records)
      if (r.n == n) part.push_back(r);
    write_file(records_path(config.model, n), records_csv(config.model, part));
  }
}

SweepConfig ResultStore::load_config() const {
  const auto p = dir_ / "config.txt";
  if (!std::filesystem::exists(p)) throw std::runtime_error("store " + dir_.string() + " is empty");
  return parse_config(read_file(p), p.string());
}

std::vector<ReplicaRecord> ResultStore::load_records(const SweepConfig& config) const {
  std::vector<ReplicaRecord> out;
  for (int n : config.n_list) {
    const auto p = records_path(config.model, n);
    if (!std::filesystem::exists(p)) continue;
    std::ifstream in(p, std::ios::binary);
    auto part = read_records_csv(in, config.model);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void ResultStore::emit_report() const {
  const auto config = load_config();
  const auto records = load_records(config);
  if (records.empty()) throw std::runtime_error("store " + dir_.string() + " has no records");
  write_file(dir_ / "summary.json", summary_json(config, records));
  write_file(dir_ / "summary_by_n.csv", summary_table_csv(config, records));
  write_file(dir_ / "plots.txt", plot_manifest(config));
}

void ResultStore::write_manifest(const SweepConfig& config, const std::string& started, const std::string& finished) const {
  Json j;
  j["config_digest"] = config_digest(config);
  j["seed"] = config.seed;
  j["tool_version"] = kToolVersion;
  j["started"] = started;
  j["finished"] = finished;
  Json counts = Json::object();
  Json files = Json::array({"config.txt"});
  const auto records = load_records(config);
  for (int n : config.n_list) {
    std::int64_t c = 0;
    for (const auto& r : records) c += r.n == n;
    counts[std::to_string(n)] = c;
    files.push_back(std::filesystem::relative(records_path(config.model, n), dir_).generic_string());
  }
  for (const char* f : {"summary.json", "summary_by_n.csv", "plots.txt"})
    if (std::filesystem::exists(dir_ / f)) files.push_back(f);
  j["records_per_n"] = counts;
  j["files"] = files;
  write_file(dir_ / "manifest.json", j.dump(2) + "\n");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fpplab
