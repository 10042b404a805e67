#include "fpplab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fpplab/lpp.hpp"

namespace fpplab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw std::invalid_argument("bad number '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("bad boolean '" + text + "' (expected true or false)");
}

std::vector<int> parse_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(trim(item)));
  if (out.empty()) throw std::invalid_argument("empty n list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::invalid_argument(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

SweepConfig parse_config(const std::string& text, const std::string& source) {
  SweepConfig c;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (value.empty()) throw ConfigError(source, line, "missing value for '" + key + "'");
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError(source, line, "key '" + key + "' repeats line " + std::to_string(it->second));
    seen[key] = line;
    try {
      if (key == "model") c.model = parse_model(value);
      else if (key == "d") c.d = parse_number<int>(value);
      else if (key == "n") c.n_list = parse_list(value);
      else if (key == "dist") c.spec = DistributionSpec::parse(value);
      else if (key == "replicas") c.replicas = parse_number<int>(value);
      else if (key == "seed") c.seed = parse_number<std::uint64_t>(value);
      else if (key == "kappa") c.kappa = parse_number<double>(value);
      else if (key == "max_grows") c.max_grows = parse_number<int>(value);
      else if (key == "bootstrap") c.bootstrap = parse_number<int>(value);
      else if (key == "dyadic_bits") c.dyadic_bits = parse_number<int>(value);
      else if (key == "fn") c.fn = parse_bool(value);
      else if (key == "efron_stein") c.efron_stein = parse_bool(value);
      else if (key == "es_resamples") c.es_resamples = parse_number<int>(value);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(source, line, e.what());
    }
  }
  if (!seen.count("n")) throw ConfigError(source, 0, "missing required key 'n'");
  if (c.model == Model::Lpp && !seen.count("dist")) c.spec = default_lpp_spec();
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(source, 0, e.what());
  }
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const SweepConfig& c) {
  std::string n;
  for (std::size_t i = 0; i < c.n_list.size(); ++i) n += (i ? "," : "") + std::to_string(c.n_list[i]);
  std::string out;
  out += "model = " + to_string(c.model) + "\n";
  out += "d = " + std::to_string(c.d) + "\n";
  out += "n = " + n + "\n";
  out += "dist = " + c.spec.to_string() + "\n";
  out += "replicas = " + std::to_string(c.replicas) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "kappa = " + fmt(c.kappa) + "\n";
  out += "max_grows = " + std::to_string(c.max_grows) + "\n";
  out += "bootstrap = " + std::to_string(c.bootstrap) + "\n";
  out += "dyadic_bits = " + std::to_string(c.dyadic_bits) + "\n";
  out += std::string("fn = ") + (c.fn ? "true" : "false") + "\n";
  out += std::string("efron_stein = ") + (c.efron_stein ? "true" : "false") + "\n";
  out += "es_resamples = " + std::to_string(c.es_resamples) + "\n";
  return out;
}

std::string config_digest(const SweepConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fpplab
