#pragma once

#include <stdexcept>
#include <string>

#include "fpplab/estimators.hpp"

namespace fpplab {

/// Parse or validation failure; `line` is 0 when not tied to a line.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Line-oriented `key = value` with `#` comments. Keys:
///   model (fpp-point | fpp-torus | lpp), d, n (comma list), dist, replicas,
///   seed, kappa, max_grows, bootstrap, dyadic_bits, fn, efron_stein,
///   es_resamples.
/// Only `n` is required; unknown or repeated keys are errors. Without `dist`
/// the law is Uniform{0,1}, or the geometric mean-1 law for lpp. The result
/// is validated.
SweepConfig parse_config(const std::string& text, const std::string& source = "<config>");
SweepConfig load_config(const std::string& path);

/// Every key, one per line, in a fixed order; parse_config inverts it.
std::string serialize_config(const SweepConfig& config);

/// FNV-1a of serialize_config, 16 hex digits.
std::string config_digest(const SweepConfig& config);

}  // namespace fpplab
