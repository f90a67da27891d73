#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac/altmin.hpp"
#include "isac/factorize.hpp"
#include "isac/model.hpp"

namespace isac {

/// Bad configuration input. what() starts with the offending field name.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(const std::string &field, const std::string &message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string &field() const { return field_; }

private:
  std::string field_;
};

/// Everything needed to reproduce one design run.
struct RunConfig {
  Scenario scenario;
  StopRule design_stop;
  StopRule factorization_stop = default_factorization_stop();
  double solver_tol = 1e-8;

  bool operator==(const RunConfig &) const = default;
};

struct SweepSpec {
  RunConfig base;
  std::vector<double> gamma_db_values;
  std::vector<int> n_bs_values;
  std::vector<std::uint64_t> seeds;

  bool operator==(const SweepSpec &) const = default;
};

/// Parses a run configuration. Power and SINR may be given in dB
/// (p_t_dbm, noise_power_dbm, sinr_db) or linear units (p_t_mw,
/// noise_power_mw, sinr_linear); dB values are converted here. Unknown keys
/// are rejected.
RunConfig parse_run_config(const nlohmann::json &doc);

/// Canonical form: linear units, every field present.
nlohmann::json to_json(const RunConfig &config);

SweepSpec parse_sweep_spec(const nlohmann::json &doc);
nlohmann::json to_json(const SweepSpec &spec);

/// Reads a JSON document; parse errors become ConfigError.
nlohmann::json read_json_file(const std::string &path);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig &config);

/// Point of a sweep: base with all thresholds set to gamma_db, n_bs and seed.
RunConfig sweep_point(const SweepSpec &spec, double gamma_db, int n_bs, std::uint64_t seed);

} // namespace isac
