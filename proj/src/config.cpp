#include "isac/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>

namespace isac {

using nlohmann::json;

namespace {

void reject_unknown(const json &doc, const std::set<std::string> &known, const std::string &prefix) {
  for (const auto &item : doc.items()) {
    if (known.count(item.key()) == 0) {
      throw ConfigError(prefix + item.key(), "unknown key");
    }
  }
}

double get_number(const json &doc, const std::string &key, const std::string &field) {
  const json &v = doc.at(key);
  if (!v.is_number()) {
    throw ConfigError(field, "must be a number");
  }
  return v.get<double>();
}

int get_int(const json &doc, const std::string &key, const std::string &field) {
  const json &v = doc.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(field, "must be an integer");
  }
  return v.get<int>();
}

std::vector<double> get_numbers(const json &v, const std::string &field) {
  if (!v.is_array()) {
    throw ConfigError(field, "must be a list of numbers");
  }
  std::vector<double> out;
  for (const auto &x : v) {
    if (!x.is_number()) {
      throw ConfigError(field, "must be a list of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

bool is_non_negative_integer(const json &v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Exactly one of the two spellings may be present.
const json *pick(const json &doc, const std::string &linear, const std::string &db) {
  const bool has_linear = doc.contains(linear);
  const bool has_db = doc.contains(db);
  if (has_linear && has_db) {
    throw ConfigError(linear, "give either " + linear + " or " + db + ", not both");
  }
  if (has_linear) {
    return &doc.at(linear);
  }
  if (has_db) {
    return &doc.at(db);
  }
  return nullptr;
}

StopRule parse_stop(const json &doc, StopRule rule, const std::string &prefix) {
  if (!doc.is_object()) {
    throw ConfigError(prefix, "must be an object");
  }
  reject_unknown(doc, {"max_iters", "objective_threshold", "relative_change_threshold"},
                 prefix + ".");
  if (doc.contains("max_iters")) {
    rule.max_iters = get_int(doc, "max_iters", prefix + ".max_iters");
  }
  for (const char *key : {"objective_threshold", "relative_change_threshold"}) {
    if (!doc.contains(key)) {
      continue;
    }
    std::optional<double> &slot = std::string(key) == "objective_threshold"
                                      ? rule.objective_threshold
                                      : rule.relative_change_threshold;
    if (doc.at(key).is_null()) {
      slot.reset();
    } else {
      slot = get_number(doc, key, prefix + "." + key);
    }
  }
  try {
    rule.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(prefix, e.what());
  }
  return rule;
}

json stop_to_json(const StopRule &rule) {
  json out;
  out["max_iters"] = rule.max_iters;
  out["objective_threshold"] =
      rule.objective_threshold ? json(*rule.objective_threshold) : json(nullptr);
  out["relative_change_threshold"] =
      rule.relative_change_threshold ? json(*rule.relative_change_threshold) : json(nullptr);
  return out;
}

std::string field_of(const std::invalid_argument &e) {
  const std::string what = e.what();
  const auto colon = what.find(':');
  return colon == std::string::npos ? std::string("scenario") : what.substr(0, colon);
}

} // namespace

RunConfig parse_run_config(const json &doc) {
  if (!doc.is_object()) {
    throw ConfigError("config", "must be a JSON object");
  }
  reject_unknown(doc,
                 {"n_bs", "n_c", "n_t", "p_t_mw", "p_t_dbm", "noise_power_mw",
                  "noise_power_dbm", "sinr_linear", "sinr_db", "grid_size", "objective_bands_deg",
                  "weight_diag", "user_angles_deg", "nlos_paths_per_user", "nlos_gain_variance",
                  "seed", "design_stop", "factorization_stop", "solver_tol"},
                 "");
  RunConfig config;
  Scenario &s = config.scenario;
  try {
    if (doc.contains("n_bs")) {
      s.n_bs = get_int(doc, "n_bs", "n_bs");
    }
    if (doc.contains("n_c")) {
      s.n_c = get_int(doc, "n_c", "n_c");
    }
    if (doc.contains("n_t")) {
      s.n_t = get_int(doc, "n_t", "n_t");
    }
    if (const json *v = pick(doc, "p_t_mw", "p_t_dbm")) {
      const bool db = doc.contains("p_t_dbm");
      const std::string field = db ? "p_t_dbm" : "p_t_mw";
      if (!v->is_number()) {
        throw ConfigError(field, "must be a number");
      }
      s.p_t = db ? dbm_to_mw(v->get<double>()) : v->get<double>();
    }
    if (const json *v = pick(doc, "noise_power_mw", "noise_power_dbm")) {
      const bool db = doc.contains("noise_power_dbm");
      const std::string field = db ? "noise_power_dbm" : "noise_power_mw";
      if (!v->is_number()) {
        throw ConfigError(field, "must be a number");
      }
      s.noise_power = db ? dbm_to_mw(v->get<double>()) : v->get<double>();
    }
    if (const json *v = pick(doc, "sinr_linear", "sinr_db")) {
      const bool db = doc.contains("sinr_db");
      const std::string field = db ? "sinr_db" : "sinr_linear";
      std::vector<double> values;
      if (v->is_number()) {
        values.assign(static_cast<std::size_t>(std::max(s.n_c, 0)), v->get<double>());
      } else {
        values = get_numbers(*v, field);
      }
      for (double &x : values) {
        x = db ? db_to_linear(x) : x;
      }
      s.sinr_thresholds = values;
    } else {
      s.sinr_thresholds.assign(static_cast<std::size_t>(std::max(s.n_c, 0)), 1000.0);
    }
    if (doc.contains("grid_size")) {
      s.grid_size = get_int(doc, "grid_size", "grid_size");
    }
    if (doc.contains("objective_bands_deg")) {
      const json &bands = doc.at("objective_bands_deg");
      if (!bands.is_array()) {
        throw ConfigError("objective_bands_deg", "must be a list of [lower, upper] pairs");
      }
      s.objective_bands.clear();
      for (const auto &band : bands) {
        const auto pair = get_numbers(band, "objective_bands_deg");
        if (pair.size() != 2) {
          throw ConfigError("objective_bands_deg", "each band must be [lower, upper]");
        }
        s.objective_bands.push_back({pair[0], pair[1]});
      }
    }
    if (doc.contains("weight_diag")) {
      s.weight_diag = get_numbers(doc.at("weight_diag"), "weight_diag");
    }
    if (doc.contains("user_angles_deg")) {
      s.user_angles_deg = get_numbers(doc.at("user_angles_deg"), "user_angles_deg");
    }
    if (doc.contains("nlos_paths_per_user")) {
      s.nlos_paths_per_user = get_int(doc, "nlos_paths_per_user", "nlos_paths_per_user");
    }
    if (doc.contains("nlos_gain_variance")) {
      s.nlos_gain_variance = get_number(doc, "nlos_gain_variance", "nlos_gain_variance");
    }
    if (doc.contains("seed")) {
      const json &v = doc.at("seed");
      if (!is_non_negative_integer(v)) {
        throw ConfigError("seed", "must be a non-negative integer");
      }
      s.rng_seed = v.get<std::uint64_t>();
    }
    if (doc.contains("design_stop")) {
      config.design_stop = parse_stop(doc.at("design_stop"), config.design_stop, "design_stop");
    }
    if (doc.contains("factorization_stop")) {
      config.factorization_stop =
          parse_stop(doc.at("factorization_stop"), config.factorization_stop,
                     "factorization_stop");
    }
    if (doc.contains("solver_tol")) {
      config.solver_tol = get_number(doc, "solver_tol", "solver_tol");
      if (!(config.solver_tol > 0.0)) {
        throw ConfigError("solver_tol", "must be positive");
      }
    }
  } catch (const json::exception &e) {
    throw ConfigError("config", e.what());
  }

  try {
    s.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(field_of(e), e.what());
  }
  return config;
}

json to_json(const RunConfig &config) {
  const Scenario &s = config.scenario;
  json out;
  out["n_bs"] = s.n_bs;
  out["n_c"] = s.n_c;
  out["n_t"] = s.n_t;
  out["p_t_mw"] = s.p_t;
  out["noise_power_mw"] = s.noise_power;
  out["sinr_linear"] = s.sinr_thresholds;
  out["grid_size"] = s.grid_size;
  json bands = json::array();
  for (const auto &band : s.objective_bands) {
    bands.push_back({band.lower_deg, band.upper_deg});
  }
  out["objective_bands_deg"] = bands;
  out["weight_diag"] = s.weight_diag;
  out["user_angles_deg"] = s.user_angles_deg;
  out["nlos_paths_per_user"] = s.nlos_paths_per_user;
  out["nlos_gain_variance"] = s.nlos_gain_variance;
  out["seed"] = s.rng_seed;
  out["design_stop"] = stop_to_json(config.design_stop);
  out["factorization_stop"] = stop_to_json(config.factorization_stop);
  out["solver_tol"] = config.solver_tol;
  return out;
}

SweepSpec parse_sweep_spec(const json &doc) {
  if (!doc.is_object()) {
    throw ConfigError("sweep", "must be a JSON object");
  }
  reject_unknown(doc, {"base", "gamma_db", "n_bs", "seeds"}, "");
  SweepSpec spec;
  if (!doc.contains("base")) {
    throw ConfigError("base", "missing");
  }
  spec.base = parse_run_config(doc.at("base"));

  try {
    if (!doc.contains("gamma_db")) {
      throw ConfigError("gamma_db", "missing");
    }
    spec.gamma_db_values = get_numbers(doc.at("gamma_db"), "gamma_db");
    if (!doc.contains("n_bs")) {
      throw ConfigError("n_bs", "missing");
    }
    for (double n : get_numbers(doc.at("n_bs"), "n_bs")) {
      if (!(n >= 1.0) || n != static_cast<double>(static_cast<int>(n))) {
        throw ConfigError("n_bs", "entries must be positive integers");
      }
      spec.n_bs_values.push_back(static_cast<int>(n));
    }
    if (!doc.contains("seeds")) {
      throw ConfigError("seeds", "missing");
    }
    const json &seeds = doc.at("seeds");
    if (!seeds.is_array()) {
      throw ConfigError("seeds", "must be a list of non-negative integers");
    }
    for (const auto &s : seeds) {
      if (!is_non_negative_integer(s)) {
        throw ConfigError("seeds", "must be a list of non-negative integers");
      }
      spec.seeds.push_back(s.get<std::uint64_t>());
    }
  } catch (const json::exception &e) {
    throw ConfigError("sweep", e.what());
  }
  if (spec.gamma_db_values.empty()) {
    throw ConfigError("gamma_db", "must not be empty");
  }
  if (spec.n_bs_values.empty()) {
    throw ConfigError("n_bs", "must not be empty");
  }
  if (spec.seeds.empty()) {
    throw ConfigError("seeds", "must not be empty");
  }
  for (double g : spec.gamma_db_values) {
    if (!std::isfinite(g)) {
      throw ConfigError("gamma_db", "entries must be finite");
    }
  }
  return spec;
}

json to_json(const SweepSpec &spec) {
  json out;
  out["base"] = to_json(spec.base);
  out["gamma_db"] = spec.gamma_db_values;
  out["n_bs"] = spec.n_bs_values;
  out["seeds"] = spec.seeds;
  return out;
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("config", std::string("parse error: ") + e.what());
  }
}

std::string config_hash(const RunConfig &config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunConfig sweep_point(const SweepSpec &spec, double gamma_db, int n_bs, std::uint64_t seed) {
  RunConfig config = spec.base;
  config.scenario.n_bs = n_bs;
  config.scenario.sinr_thresholds.assign(static_cast<std::size_t>(config.scenario.n_c),
                                         db_to_linear(gamma_db));
  config.scenario.rng_seed = seed;
  return config;
}

} // namespace isac
