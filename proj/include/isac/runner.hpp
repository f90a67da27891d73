#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac/config.hpp"
#include "isac/metrics.hpp"

namespace isac {

inline constexpr const char *kVersion = "0.1.0";

enum class RunOutcome { success, infeasible, numerical_failure };

struct StageTimings {
  double channels_s = 0.0;
  double design_s = 0.0;
  double factorization_s = 0.0;
  double evaluation_s = 0.0;
  double total_s = 0.0;
};

struct RunRecord {
  RunConfig config;
  std::string config_hash;
  ChannelSet channels;
  PatternSpec pattern;
  BeamDesign design;
  /// Empty unless the design produced beamformers.
  HybridFactors factors;
  EvaluationReport report;
  StageTimings timings;
  RunOutcome outcome = RunOutcome::numerical_failure;
};

/// Channels, transmit-beam design, factorization and evaluation for one
/// configuration. Every random draw comes from one generator seeded with
/// config.scenario.rng_seed, in that order.
RunRecord execute(const RunConfig &config);

nlohmann::json to_json(const RunRecord &record);

/// Writes record.json always, and pattern.csv and trace.csv when the design
/// produced beamformers.
void write_run_outputs(const RunRecord &record, const std::filesystem::path &dir);

struct SweepRow {
  double gamma_db = 0.0;
  int n_bs = 0;
  std::uint64_t seed = 0;
  double mse_no_hbf = 0.0;
  double mse_hbf = 0.0;
  double min_user_sinr_db = 0.0;
  int iterations = 0;
  double runtime_s = 0.0;
  /// converged, max-iters, infeasible, failed, or error.
  std::string status;
  std::string config_hash;
  std::string error;
};

struct SweepMedian {
  double gamma_db = 0.0;
  int n_bs = 0;
  int points = 0;
  int feasible = 0;
  double median_mse_no_hbf = 0.0;
  double median_mse_hbf = 0.0;
};

/// Runs every (gamma, n_bs, seed) point on up to `workers` threads, writing
/// each run under dir/runs/ and the summary tables under dir. Rows come back
/// in the sweep's nesting order regardless of scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec &spec, const std::filesystem::path &dir,
                                int workers);

/// Medians over seeds per (gamma, n_bs). Points without a design count as
/// +infinity.
std::vector<SweepMedian> median_over_seeds(const std::vector<SweepRow> &rows);

/// Shortest decimal text that reads back to the same double; inf and nan are
/// spelled out.
std::string format_number(double x);

} // namespace isac
