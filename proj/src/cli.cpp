#include "fpplab/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "fpplab/config.hpp"
#include "fpplab/store.hpp"

namespace fpplab {

namespace {

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Flags shared by the sweep subcommands. Each flag that was given replaces
// the same key of the config file, so one grammar validates both.
struct SweepFlags {
  std::string config;
  std::string out;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool efron_stein = false;
  CLI::Option* efron_stein_opt = nullptr;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config, "config file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "result directory (default runs/<model>_<digest>)");
    const std::pair<const char*, const char*> keys[] = {
        {"d", "dimension"},
        {"n", "comma list of sizes"},
        {"dist", "weight law, e.g. uniform:0,1 or bernoulli:1,2,0.5"},
        {"replicas", "replicas per size"},
        {"seed", "master seed"},
        {"kappa", "window margin factor"},
        {"max_grows", "window regrowth limit"},
        {"bootstrap", "bootstrap resamples"},
        {"dyadic_bits", "dyadic truncation depth"},
        {"es_resamples", "resamples per edge for the Efron-Stein estimate (0 = exact)"},
    };
    for (const auto& [key, help] : keys) {
      std::string flag = "--" + std::string(key);
      for (char& c : flag)
        if (c == '_') c = '-';
      options[key] = sub->add_option(flag, values[key], help);
    }
  }

  void attach_efron_stein(CLI::App* sub) {
    efron_stein_opt = sub->add_flag("--efron-stein", efron_stein, "estimate the Efron-Stein bound per replica");
  }

  SweepConfig build(Model model, bool fn) const {
    std::map<std::string, std::string> over;
    for (const auto& [key, opt] : options)
      if (opt->count()) over[key] = values.at(key);
    if (efron_stein_opt && efron_stein_opt->count()) over["efron_stein"] = efron_stein ? "true" : "false";
    if (fn) over["fn"] = "true";
    std::string text, source = "<flags>";
    if (!config.empty()) {
      source = config;
      std::istringstream in(slurp(config));
      std::string raw;
      int line = 0;
      while (std::getline(in, raw)) {
        ++line;
        const std::string body = trim(raw.substr(0, raw.find('#')));
        const auto eq = body.find('=');
        const std::string key = eq == std::string::npos ? std::string() : trim(body.substr(0, eq));
        if (key == "model" && parse_model(trim(body.substr(eq + 1))) != model)
          throw ConfigError(config, line, "model " + trim(body.substr(eq + 1)) + " does not match the subcommand");
        // Blank out overridden lines so later line numbers still match the file.
        text += (over.count(key) || key == "model") ? "\n" : raw + "\n";
      }
    }
    text += "model = " + to_string(model) + "\n";
    for (const auto& [key, value] : over) text += key + " = " + value + "\n";
    return parse_config(text, source);
  }
};

void print_sizes(std::ostream& out, const SweepConfig& config, const std::vector<ReplicaRecord>& records) {
  const auto T = summarize_column(records, "T", &ReplicaRecord::T, config.bootstrap);
  out << format("%6s %8s %14s %14s %24s %12s\n", "n", "count", "mean_T", "var_T", "var_T_ci", "var_T/n");
  for (const auto& r : T) {
    const auto& s = r.summary;
    out << format("%6d %8lld %14.6g %14.6g   [%9.4g, %9.4g] %12.6g\n", r.n, static_cast<long long>(s.count), s.mean,
                  s.variance, s.variance_ci.lo, s.variance_ci.hi, s.variance / r.n);
  }
  std::vector<std::pair<double, double>> pairs;
  for (const auto& r : T) pairs.emplace_back(r.n, r.summary.variance);
  try {
    const auto f = fit_chi(pairs);
    out << format("chi_hat=%.4f stderr=%.4f\n", f.chi_hat, f.chi_stderr);
  } catch (const std::invalid_argument&) {
  }
}

void print_extras(std::ostream& out, const SweepConfig& config, const std::vector<ReplicaRecord>& records) {
  if (config.model == Model::FppTorus) {
    out << format("%6s %12s %12s %6s %12s %12s\n", "n", "mean_g", "max_freq", "axis", "chi2", "p_value");
    for (int n : record_sizes(records)) {
      const auto m = influence_map(records, n, config.d);
      for (const auto& a : m.axes)
        out << format("%6d %12.6g %12.6g %6d %12.6g %12.6g\n", n, m.mean_g, m.max_freq, a.axis, a.chi2,
                      a.p_randomization);
    }
  }
  if (config.fn) {
    const auto c = compare_fn_variance(records);
    out << format("%6s %14s %14s %14s\n", "n", "var_T", "var_F", "diff/n^0.75");
    for (const auto& r : c.rows) out << format("%6d %14.6g %14.6g %14.6g\n", r.n, r.var_T, r.var_F, r.ratio);
    out << "bounded=" << (c.bounded ? "true" : "false") << "\n";
  }
  if (config.efron_stein) {
    out << format("%6s %14s %14s %6s\n", "n", "es_bound", "var_T", "holds");
    for (const auto& r : efron_stein_rows(records, config.bootstrap))
      out << format("%6d %14.6g %14.6g %6s\n", r.n, r.bound.mean, r.T.variance, r.holds ? "yes" : "no");
  }
}

int run_sweep_command(const SweepConfig& config, const std::string& out_dir, int threads, std::ostream& out) {
  const std::string started = utc_timestamp();
  const auto records = run_sweep(config, threads);
  const std::string finished = utc_timestamp();
  const ResultStore store(out_dir.empty() ? "runs/" + to_string(config.model) + "_" + config_digest(config) : out_dir);
  store.write_sweep(config, records);
  // Summaries are regenerated from the files just written, as `report` would.
  store.emit_report();
  store.write_manifest(config, started, finished);
  out << "model=" << to_string(config.model) << " dist=" << config.spec.to_string()
      << " digest=" << config_digest(config) << "\n";
  print_sizes(out, config, records);
  print_extras(out, config, records);
  out << "results: " << store.dir().string() << "\n";
  return kExitOk;
}

}  // namespace

std::vector<std::pair<double, double>> read_variance_table(const std::string& path) {
  const std::string text = slurp(path);
  std::vector<std::pair<double, double>> out;
  if (std::filesystem::path(path).extension() == ".csv") {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> head;
    std::stringstream hs(line);
    for (std::string h; std::getline(hs, h, ',');) head.push_back(trim(h));
    auto find = [&](std::initializer_list<const char*> names) {
      for (std::size_t i = 0; i < head.size(); ++i)
        for (const char* name : names)
          if (head[i] == name) return i;
      throw std::runtime_error(path + ": needs columns n and var_T");
    };
    const std::size_t in_n = find({"n"}), in_v = find({"var_T", "variance", "var"});
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      for (std::string x; std::getline(ls, x, ',');) f.push_back(trim(x));
      if (f.size() <= std::max(in_n, in_v)) throw std::runtime_error(path + ": short row");
      out.emplace_back(std::stod(f[in_n]), std::stod(f[in_v]));
    }
    return out;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    if (j.is_object() && j.contains("columns")) {
      for (const auto& row : j.at("columns").at("T")) out.emplace_back(row.at("n").get<double>(), row.at("variance").get<double>());
    } else if (j.is_object() && j.contains("n")) {
      const auto& v = j.contains("variance") ? j.at("variance") : j.at("var");
      if (v.size() != j.at("n").size()) throw std::runtime_error(path + ": n and variance differ in length");
      for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(j.at("n")[i].get<double>(), v[i].get<double>());
    } else if (j.is_array()) {
      for (const auto& row : j) out.emplace_back(row.at("n").get<double>(), row.at("variance").get<double>());
    } else {
      throw std::runtime_error(path + ": unrecognized layout");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return out;
}

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo laboratory for first- and last-passage percolation", "fpplab"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->envname("FPPLAB_THREADS")->check(CLI::NonNegativeNumber);

  auto* fpp = app.add_subcommand("fpp", "point-to-point first passage")->require_subcommand(1);
  SweepFlags fpp_run_flags, fpp_fn_flags, torus_flags, lpp_flags;
  auto* fpp_run = fpp->add_subcommand("run", "passage times, geodesic statistics and Efron-Stein estimates");
  fpp_run_flags.attach(fpp_run);
  fpp_run_flags.attach_efron_stein(fpp_run);
  auto* fpp_fn = fpp->add_subcommand("fn", "passage time against the averaged passage time F_n");
  fpp_fn_flags.attach(fpp_fn);
  fpp_fn_flags.attach_efron_stein(fpp_fn);

  auto* torus = app.add_subcommand("torus", "winding geodesics on the torus")->require_subcommand(1);
  auto* torus_inf = torus->add_subcommand("influence", "per-edge membership in the geodesic intersection");
  torus_flags.attach(torus_inf);

  auto* lpp = app.add_subcommand("lpp", "directed last passage")->require_subcommand(1);
  auto* lpp_run = lpp->add_subcommand("run", "last passage times on the n x n grid");
  lpp_flags.attach(lpp_run);

  auto* fit = app.add_subcommand("fit", "exponent fits")->require_subcommand(1);
  auto* fit_chi_cmd = fit->add_subcommand("chi", "fit Var ~ n^(2 chi) from a summary");
  std::string fit_input;
  fit_chi_cmd->add_option("--input", fit_input, "summary JSON or CSV with n and var_T")->required();

  auto* ineq = app.add_subcommand("ineq", "inequality checks")->require_subcommand(1);
  auto* verify = ineq->add_subcommand("verify", "randomized and exhaustive inequality suites");
  std::string suite = "all", ineq_out;
  std::uint64_t ineq_seed = 1;
  std::int64_t instances = 10000;
  verify->add_option("--suite", suite, "suite name or all");
  verify->add_option("--seed", ineq_seed, "master seed");
  verify->add_option("--instances", instances, "instances per check")->check(CLI::PositiveNumber);
  verify->add_option("--out", ineq_out, "write the JSON report here");

  auto* report = app.add_subcommand("report", "regenerate summaries from a result directory");
  std::string report_dir;
  report->add_option("--dir", report_dir, "result directory")->required()->check(CLI::ExistingDirectory);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    // Show the help of the deepest subcommand that was reached.
    const CLI::App* deepest = &app;
    while (!deepest->get_subcommands().empty()) deepest = deepest->get_subcommands().front();
    err << deepest->help();
    return kExitConfig;
  }

  try {
    if (fpp_run->parsed()) return run_sweep_command(fpp_run_flags.build(Model::FppPoint, false), fpp_run_flags.out, threads, out);
    if (fpp_fn->parsed()) return run_sweep_command(fpp_fn_flags.build(Model::FppPoint, true), fpp_fn_flags.out, threads, out);
    if (torus_inf->parsed()) return run_sweep_command(torus_flags.build(Model::FppTorus, false), torus_flags.out, threads, out);
    if (lpp_run->parsed()) return run_sweep_command(lpp_flags.build(Model::Lpp, false), lpp_flags.out, threads, out);
    if (fit_chi_cmd->parsed()) {
      const auto f = fit_chi(read_variance_table(fit_input));
      out << format("chi=%.4f stderr=%.4f sigma=%.6g points=%d\n", f.chi_hat, f.chi_stderr, f.sigma_hat, f.points);
      return kExitOk;
    }
    if (verify->parsed()) {
      const auto suites = ineq::run_suite(suite, instances, ineq_seed, threads);
      bool ok = true;
      out << format("%-22s %10s %10s %10s %10s %14s\n", "check", "instances", "violations", "equalities", "vacuous",
                    "min_margin");
      for (const auto& s : suites) {
        out << format("%-22s %10lld %10lld %10lld %10lld %14.6g\n", s.check.c_str(), static_cast<long long>(s.instances),
                      static_cast<long long>(s.violations), static_cast<long long>(s.equalities),
                      static_cast<long long>(s.vacuous), s.min_margin);
        if (!s.passed()) err << "violation in " << s.check << ", worst input digest " << s.worst_digest << "\n";
        ok = ok && s.passed();
      }
      if (!ineq_out.empty()) {
        std::ofstream f(ineq_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + ineq_out);
        f << ineq_report_json(suites, ineq_seed);
      }
      return ok ? kExitOk : kExitVerification;
    }
    if (report->parsed()) {
      const ResultStore store(report_dir);
      store.emit_report();
      const auto config = store.load_config();
      print_sizes(out, config, store.load_records(config));
      out << "wrote " << (store.dir() / "summary.json").string() << "\n";
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    // Includes ConfigError.
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << app.help();
  return kExitConfig;
}

int cli_run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_run(args, std::cout, std::cerr);
}

}  // namespace fpplab
