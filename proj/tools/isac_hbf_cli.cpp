// Command-line front end: run, sweep, validate.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isac/config.hpp"
#include "isac/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  int workers = 1;
};

void apply_overrides(isac::RunConfig &config, const Options &opt) {
  if (opt.seed) {
    config.scenario.rng_seed = *opt.seed;
  }
  if (opt.max_iters) {
    if (*opt.max_iters < 1) {
      throw isac::ConfigError("--max-iters", "must be at least 1");
    }
    config.design_stop.max_iters = *opt.max_iters;
  }
}

int cmd_run(const Options &opt) {
  isac::RunConfig config = isac::parse_run_config(isac::read_json_file(opt.config_path));
  apply_overrides(config, opt);
  const isac::RunRecord record = isac::execute(config);
  isac::write_run_outputs(record, opt.out_dir);

  std::printf("status %s, %zu iterations, config %s\n",
              std::string(isac::to_string(record.design.status)).c_str(),
              record.design.trace.size(), record.config_hash.c_str());
  switch (record.outcome) {
  case isac::RunOutcome::success:
    std::printf("mse_no_hbf %.6g  mse_hbf %.6g\n", record.report.mse_no_hbf,
                record.report.mse_hbf);
    return kExitOk;
  case isac::RunOutcome::infeasible:
    std::fprintf(stderr, "SINR thresholds are unreachable under the power budget\n");
    return kExitInfeasible;
  case isac::RunOutcome::numerical_failure:
    std::fprintf(stderr, "conic solver failed\n");
    return kExitNumerical;
  }
  return kExitNumerical;
}

int cmd_sweep(const Options &opt) {
  isac::SweepSpec spec = isac::parse_sweep_spec(isac::read_json_file(opt.config_path));
  if (opt.seed) {
    spec.seeds = {*opt.seed};
  }
  if (opt.max_iters) {
    Options only_iters;
    only_iters.max_iters = opt.max_iters;
    apply_overrides(spec.base, only_iters);
  }
  if (opt.workers < 1) {
    throw isac::ConfigError("--workers", "must be at least 1");
  }
  const auto rows = isac::run_sweep(spec, opt.out_dir, opt.workers);
  int errors = 0;
  for (const auto &row : rows) {
    if (row.status == "error") {
      ++errors;
      std::fprintf(stderr, "point gamma %g n_bs %d seed %llu: %s\n", row.gamma_db, row.n_bs,
                   static_cast<unsigned long long>(row.seed), row.error.c_str());
    }
  }
  for (const auto &m : isac::median_over_seeds(rows)) {
    std::printf("gamma %6g dB  n_bs %4d  feasible %d/%d  median mse_no_hbf %s  mse_hbf %s\n",
                m.gamma_db, m.n_bs, m.feasible, m.points,
                isac::format_number(m.median_mse_no_hbf).c_str(),
                isac::format_number(m.median_mse_hbf).c_str());
  }
  return errors > 0 ? kExitNumerical : kExitOk;
}

int cmd_validate(const Options &opt) {
  const nlohmann::json doc = isac::read_json_file(opt.config_path);
  if (doc.is_object() && doc.contains("base")) {
    const isac::SweepSpec spec = isac::parse_sweep_spec(doc);
    std::printf("valid sweep: %zu points\n",
                spec.gamma_db_values.size() * spec.n_bs_values.size() * spec.seeds.size());
    std::cout << isac::to_json(spec).dump(2) << "\n";
    return kExitOk;
  }
  isac::RunConfig config = isac::parse_run_config(doc);
  apply_overrides(config, opt);
  std::printf("valid run config, hash %s\n", isac::config_hash(config).c_str());
  std::cout << isac::to_json(config).dump(2) << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Hybrid beamforming design for mmWave MIMO ISAC"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App *sub, const std::string &what) {
    sub->add_option("config", opt.config_path, what)->required();
    sub->add_option("--seed", opt.seed, "Override the RNG seed");
    sub->add_option("--max-iters", opt.max_iters, "Override the design iteration limit");
  };

  CLI::App *run = app.add_subcommand("run", "Design, factorize and evaluate one scenario");
  add_common(run, "Scenario config (JSON)");
  run->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();

  CLI::App *sweep = app.add_subcommand("sweep", "Run a gamma x n_bs x seed sweep");
  add_common(sweep, "Sweep config (JSON)");
  sweep->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  sweep->add_option("--workers", opt.workers, "Concurrent sweep points")->capture_default_str();

  CLI::App *validate = app.add_subcommand("validate", "Check a config and print its canonical form");
  add_common(validate, "Scenario or sweep config (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return cmd_run(opt);
    }
    if (sweep->parsed()) {
      return cmd_sweep(opt);
    }
    return cmd_validate(opt);
  } catch (const isac::ConfigError &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}
