#include "isac/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

namespace isac {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rad_to_deg(double x) { return x * 180.0 / kPi; }

json vector_json(const rvec &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json complex_matrix_json(const cmat &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

std::string outcome_name(RunOutcome outcome) {
  switch (outcome) {
  case RunOutcome::success:
    return "success";
  case RunOutcome::infeasible:
    return "infeasible";
  case RunOutcome::numerical_failure:
    return "numerical-failure";
  }
  return "numerical-failure";
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (n % 2 == 1) {
    return v[n / 2];
  }
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string point_name(double gamma_db, int n_bs, std::uint64_t seed) {
  return "gamma_" + format_number(gamma_db) + "_nbs_" + std::to_string(n_bs) + "_seed_" +
         std::to_string(seed);
}

} // namespace

std::string format_number(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

RunRecord execute(const RunConfig &config) {
  const auto start = Clock::now();
  RunRecord record;
  record.config = config;
  record.config_hash = config_hash(config);
  const Scenario &scenario = config.scenario;
  scenario.validate();

  Rng rng(scenario.rng_seed);
  auto t = Clock::now();
  record.channels = generate_channels(scenario, rng);
  record.pattern = build_pattern_spec(scenario);
  record.timings.channels_s = seconds_since(t);

  t = Clock::now();
  record.design = design_transmit_beam(scenario, record.channels, record.pattern,
                                       config.design_stop, rng, config.solver_tol);
  record.timings.design_s = seconds_since(t);

  if (record.design.f_list.size() > 0) {
    t = Clock::now();
    record.factors = factorize(record.design.f_list, scenario, config.factorization_stop, rng);
    record.timings.factorization_s = seconds_since(t);
    t = Clock::now();
    record.report =
        evaluate(record.design, record.factors, record.channels, record.pattern, scenario);
    record.timings.evaluation_s = seconds_since(t);
    record.outcome = RunOutcome::success;
  } else {
    record.outcome = record.design.status == DesignStatus::infeasible
                         ? RunOutcome::infeasible
                         : RunOutcome::numerical_failure;
  }
  record.timings.total_s = seconds_since(start);
  return record;
}

json to_json(const RunRecord &record) {
  json out;
  out["version"] = kVersion;
  out["config"] = to_json(record.config);
  out["config_hash"] = record.config_hash;
  out["seed"] = record.config.scenario.rng_seed;
  out["outcome"] = outcome_name(record.outcome);
  out["design"] = {
      {"status", std::string(to_string(record.design.status))},
      {"solver_failure", record.design.solver_failure},
      {"conic_solves", record.design.conic_solves},
      {"phase_updates", record.design.phase_updates},
      {"trace", record.design.trace},
  };
  out["timings_s"] = {
      {"channels", record.timings.channels_s},
      {"design", record.timings.design_s},
      {"factorization", record.timings.factorization_s},
      {"evaluation", record.timings.evaluation_s},
      {"total", record.timings.total_s},
  };
  if (record.outcome != RunOutcome::success) {
    return out;
  }
  const HybridFactors &f = record.factors;
  out["factorization"] = {
      {"converged", f.converged},
      {"regularized", f.regularized},
      {"normalization_skipped", f.normalization_skipped},
      {"residual_trace", f.residual_trace},
  };
  const EvaluationReport &r = record.report;
  out["evaluation"] = {
      {"mse_no_hbf", r.mse_no_hbf},
      {"mse_hbf", r.mse_hbf},
      {"sinr_no_hbf_db", r.sinr_no_hbf_db},
      {"sinr_hbf_db", r.sinr_hbf_db},
      {"feasible", r.feasible},
  };
  out["beamformers"] = {
      {"f_hat", complex_matrix_json(record.design.f_list)},
      {"f_rf", complex_matrix_json(f.f_rf)},
      {"f_bb", complex_matrix_json(f.f_bb)},
  };
  out["phase"] = complex_matrix_json(record.design.p);
  out["grid"] = vector_json(record.pattern.grid);
  return out;
}

void write_run_outputs(const RunRecord &record, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "record.json", to_json(record).dump(2) + "\n");
  if (record.outcome != RunOutcome::success) {
    return;
  }
  const std::string seed = std::to_string(record.config.scenario.rng_seed);
  const std::string tail = "," + seed + "," + record.config_hash + "\n";

  std::string pattern = "angle_deg,objective_dBi,dtb_dBi,dtb_hbf_dBi,seed,config_hash\n";
  const EvaluationReport &r = record.report;
  for (Eigen::Index m = 0; m < record.pattern.grid.size(); ++m) {
    pattern += format_number(rad_to_deg(std::asin(std::clamp(record.pattern.grid(m), -1.0, 1.0))));
    pattern += "," + format_number(r.objective_dbi(m));
    pattern += "," + format_number(r.dtb_dbi(m));
    pattern += "," + format_number(r.dtb_hbf_dbi(m));
    pattern += tail;
  }
  write_text(dir / "pattern.csv", pattern);

  std::string trace = "stage,iteration,value,seed,config_hash\n";
  for (std::size_t k = 0; k < record.design.trace.size(); ++k) {
    trace += "design," + std::to_string(k + 1) + "," + format_number(record.design.trace[k]) + tail;
  }
  for (std::size_t k = 0; k < record.factors.residual_trace.size(); ++k) {
    trace += "factorization," + std::to_string(k + 1) + "," +
             format_number(record.factors.residual_trace[k]) + tail;
  }
  write_text(dir / "trace.csv", trace);
}

std::vector<SweepRow> run_sweep(const SweepSpec &spec, const std::filesystem::path &dir,
                                int workers) {
  struct Point {
    double gamma_db;
    int n_bs;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  for (double g : spec.gamma_db_values) {
    for (int n : spec.n_bs_values) {
      for (std::uint64_t s : spec.seeds) {
        points.push_back({g, n, s});
      }
    }
  }
  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const Point &pt = points[i];
      SweepRow &row = rows[i];
      row.gamma_db = pt.gamma_db;
      row.n_bs = pt.n_bs;
      row.seed = pt.seed;
      row.mse_no_hbf = std::numeric_limits<double>::infinity();
      row.mse_hbf = std::numeric_limits<double>::infinity();
      row.min_user_sinr_db = std::numeric_limits<double>::quiet_NaN();
      try {
        const RunConfig config = sweep_point(spec, pt.gamma_db, pt.n_bs, pt.seed);
        row.config_hash = config_hash(config);
        const RunRecord record = execute(config);
        write_run_outputs(record, dir / "runs" / point_name(pt.gamma_db, pt.n_bs, pt.seed));
        row.status = std::string(to_string(record.design.status));
        row.iterations = static_cast<int>(record.design.trace.size());
        row.runtime_s = record.timings.total_s;
        if (record.outcome == RunOutcome::success) {
          row.mse_no_hbf = record.report.mse_no_hbf;
          row.mse_hbf = record.report.mse_hbf;
          row.min_user_sinr_db = *std::min_element(record.report.sinr_no_hbf_db.begin(),
                                                   record.report.sinr_no_hbf_db.end());
        }
      } catch (const std::exception &e) {
        row.status = "error";
        row.error = e.what();
      }
    }
  };

  const int count = std::max(1, std::min<int>(workers, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < count; ++w) {
    pool.emplace_back(work);
  }
  work();
  for (auto &th : pool) {
    th.join();
  }

  std::filesystem::create_directories(dir);
  std::string summary = "gamma_db,n_bs,seed,mse_no_hbf,mse_hbf,min_user_sinr_db,iterations,"
                        "runtime_s,status,config_hash\n";
  for (const SweepRow &row : rows) {
    summary += format_number(row.gamma_db) + "," + std::to_string(row.n_bs) + "," +
               std::to_string(row.seed) + "," + format_number(row.mse_no_hbf) + "," +
               format_number(row.mse_hbf) + "," + format_number(row.min_user_sinr_db) + "," +
               std::to_string(row.iterations) + "," + format_number(row.runtime_s) + "," +
               row.status + "," + row.config_hash + "\n";
  }
  write_text(dir / "summary.csv", summary);

  std::string medians =
      "gamma_db,n_bs,points,feasible,median_mse_no_hbf,median_mse_hbf\n";
  for (const SweepMedian &m : median_over_seeds(rows)) {
    medians += format_number(m.gamma_db) + "," + std::to_string(m.n_bs) + "," +
               std::to_string(m.points) + "," + std::to_string(m.feasible) + "," +
               format_number(m.median_mse_no_hbf) + "," + format_number(m.median_mse_hbf) + "\n";
  }
  write_text(dir / "summary_median.csv", medians);
  return rows;
}

std::vector<SweepMedian> median_over_seeds(const std::vector<SweepRow> &rows) {
  std::vector<std::pair<double, int>> order;
  std::map<std::pair<double, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::map<std::pair<double, int>, int> feasible;
  for (const SweepRow &row : rows) {
    const auto key = std::make_pair(row.gamma_db, row.n_bs);
    if (groups.find(key) == groups.end()) {
      order.push_back(key);
    }
    groups[key].first.push_back(row.mse_no_hbf);
    groups[key].second.push_back(row.mse_hbf);
    if (std::isfinite(row.mse_no_hbf)) {
      ++feasible[key];
    }
  }
  std::vector<SweepMedian> out;
  for (const auto &key : order) {
    const auto &g = groups[key];
    SweepMedian m;
    m.gamma_db = key.first;
    m.n_bs = key.second;
    m.points = static_cast<int>(g.first.size());
    m.feasible = feasible[key];
    m.median_mse_no_hbf = median(g.first);
    m.median_mse_hbf = median(g.second);
    out.push_back(m);
  }
  return out;
}

} // namespace isac
