#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "isac/runner.hpp"

using namespace isac;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("isac_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    out.push_back(line);
  }
  return out;
}

// Drops one comma-separated column from every line.
std::string without_column(const std::string &text, int column) {
  std::string out;
  for (const std::string &line : lines(text)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      cells.push_back(cell);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (static_cast<int>(i) != column) {
        out += cells[i] + ";";
      }
    }
    out += "\n";
  }
  return out;
}

RunConfig small_config(double gamma_db = 10.0) {
  RunConfig c;
  c.scenario.n_bs = 8;
  c.scenario.grid_size = 40;
  c.scenario.sinr_thresholds.assign(3, db_to_linear(gamma_db));
  c.scenario.rng_seed = 3;
  c.design_stop.max_iters = 3;
  return c;
}

int run_cli(const std::string &args) {
  const std::string cmd = std::string(ISAC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("number formatting reads back exactly") {
  Rng rng(1);
  std::uniform_real_distribution<double> uni(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = uni(rng) * std::pow(10.0, i % 20 - 10);
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  }
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(10.0) == "10");
}

TEST_CASE("single run writes its record and tables") {
  const RunConfig config = small_config();
  const RunRecord record = execute(config);
  REQUIRE(record.outcome == RunOutcome::success);
  CHECK(record.config_hash == config_hash(config));

  const fs::path dir = fresh_dir("single");
  write_run_outputs(record, dir);
  const json doc = json::parse(slurp(dir / "record.json"));
  CHECK(doc.at("version") == kVersion);
  CHECK(doc.at("seed") == 3);
  CHECK(doc.at("outcome") == "success");
  CHECK(parse_run_config(doc.at("config")) == config);
  CHECK(doc.at("design").at("trace").size() == record.design.trace.size());
  CHECK(doc.at("evaluation").at("mse_no_hbf").get<double>() == record.report.mse_no_hbf);

  const auto pattern = lines(slurp(dir / "pattern.csv"));
  REQUIRE(pattern.size() == 41u);
  CHECK(pattern[0] == "angle_deg,objective_dBi,dtb_dBi,dtb_hbf_dBi,seed,config_hash");
  CHECK(pattern[40].rfind("90,", 0) == 0);
  CHECK(pattern[1].find("," + record.config_hash) != std::string::npos);

  const auto trace = lines(slurp(dir / "trace.csv"));
  CHECK(trace[0] == "stage,iteration,value,seed,config_hash");
  CHECK(trace.size() ==
        1 + record.design.trace.size() + record.factors.residual_trace.size());
  CHECK(trace[1].rfind("design,1,", 0) == 0);
}

TEST_CASE("rerunning a config reproduces every table byte for byte") {
  const RunConfig config = small_config();
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  write_run_outputs(execute(config), a);
  write_run_outputs(execute(config), b);
  CHECK(slurp(a / "pattern.csv") == slurp(b / "pattern.csv"));
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("unreachable thresholds give an infeasible record and no tables") {
  const RunRecord record = execute(small_config(200.0));
  CHECK(record.outcome == RunOutcome::infeasible);
  const fs::path dir = fresh_dir("infeasible");
  write_run_outputs(record, dir);
  CHECK(json::parse(slurp(dir / "record.json")).at("outcome") == "infeasible");
  CHECK_FALSE(fs::exists(dir / "pattern.csv"));
  CHECK_FALSE(fs::exists(dir / "trace.csv"));
}

TEST_CASE("one-point sweep matches the single run") {
  SweepSpec spec;
  spec.base = small_config();
  spec.gamma_db_values = {10.0};
  spec.n_bs_values = {8};
  spec.seeds = {3};
  const fs::path dir = fresh_dir("one_point");
  const auto rows = run_sweep(spec, dir, 1);
  REQUIRE(rows.size() == 1u);

  const RunRecord single = execute(sweep_point(spec, 10.0, 8, 3));
  CHECK(rows[0].mse_no_hbf == single.report.mse_no_hbf);
  CHECK(rows[0].mse_hbf == single.report.mse_hbf);
  CHECK(rows[0].config_hash == single.config_hash);
  CHECK(rows[0].status == std::string(to_string(single.design.status)));

  const fs::path solo = fresh_dir("one_point_solo");
  write_run_outputs(single, solo);
  const fs::path point = dir / "runs" / "gamma_10_nbs_8_seed_3";
  CHECK(slurp(point / "pattern.csv") == slurp(solo / "pattern.csv"));

  const auto summary = lines(slurp(dir / "summary.csv"));
  REQUIRE(summary.size() == 2u);
  CHECK(summary[0] == "gamma_db,n_bs,seed,mse_no_hbf,mse_hbf,min_user_sinr_db,iterations,"
                      "runtime_s,status,config_hash");
  const auto medians = lines(slurp(dir / "summary_median.csv"));
  REQUIRE(medians.size() == 2u);
  CHECK(medians[0] == "gamma_db,n_bs,points,feasible,median_mse_no_hbf,median_mse_hbf");
}

TEST_CASE("sweep output does not depend on the worker count") {
  SweepSpec spec;
  spec.base = small_config();
  spec.gamma_db_values = {0.0, 200.0};
  spec.n_bs_values = {6, 8};
  spec.seeds = {1, 2};
  const fs::path a = fresh_dir("workers_1"), b = fresh_dir("workers_3");
  run_sweep(spec, a, 1);
  const auto rows = run_sweep(spec, b, 3);
  REQUIRE(rows.size() == 8u);
  CHECK(rows[0].gamma_db == 0.0);
  CHECK(rows[7].gamma_db == 200.0);
  CHECK(rows[7].status == "infeasible");
  CHECK(std::isinf(rows[7].mse_no_hbf));
  // runtime_s is wall-clock time.
  CHECK(without_column(slurp(a / "summary.csv"), 7) == without_column(slurp(b / "summary.csv"), 7));
  CHECK(slurp(a / "summary_median.csv") == slurp(b / "summary_median.csv"));
  CHECK(slurp(a / "runs/gamma_0_nbs_8_seed_2/trace.csv") ==
        slurp(b / "runs/gamma_0_nbs_8_seed_2/trace.csv"));
}

TEST_CASE("medians count points without a design as infinite") {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<SweepRow> rows(5);
  const double values[] = {3.0, 1.0, inf, 2.0, inf};
  for (int i = 0; i < 5; ++i) {
    rows[i].gamma_db = i < 3 ? 10.0 : 20.0;
    rows[i].n_bs = 32;
    rows[i].mse_no_hbf = values[i];
    rows[i].mse_hbf = values[i] + 1.0;
  }
  const auto m = median_over_seeds(rows);
  REQUIRE(m.size() == 2u);
  CHECK(m[0].points == 3);
  CHECK(m[0].feasible == 2);
  CHECK(m[0].median_mse_no_hbf == 3.0);
  CHECK(m[0].median_mse_hbf == 4.0);
  CHECK(m[1].feasible == 1);
  CHECK(std::isinf(m[1].median_mse_no_hbf));
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = fresh_dir("cli");
  fs::create_directories(dir);
  const std::string good = (dir / "good.json").string();
  const std::string bad = (dir / "bad.json").string();
  const std::string hopeless = (dir / "hopeless.json").string();
  std::ofstream(good) << R"({"n_bs": 8, "grid_size": 40, "sinr_db": 10, "seed": 2,
                             "design_stop": {"max_iters": 2}})";
  std::ofstream(bad) << R"({"n_bs": 8, "antennas": 3})";
  std::ofstream(hopeless) << R"({"n_bs": 8, "grid_size": 40, "sinr_db": 200})";

  CHECK(run_cli("validate " + good) == 0);
  CHECK(run_cli("validate " + std::string(ISAC_CONFIGS) + "/paper_default.json") == 0);
  CHECK(run_cli("validate " + bad) == 2);
  CHECK(run_cli("validate " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("run " + good + " --max-iters 0") == 2);
  CHECK(run_cli("run " + good + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "pattern.csv"));
  CHECK(run_cli("run " + hopeless + " --out " + (dir / "out_hopeless").string()) == 3);
  CHECK(fs::exists(dir / "out_hopeless" / "record.json"));

  // --seed overrides the configured seed.
  CHECK(run_cli("run " + good + " --seed 7 --out " + (dir / "seed7").string()) == 0);
  CHECK(json::parse(slurp(dir / "seed7" / "record.json")).at("seed") == 7);
}

TEST_CASE("shipped configs parse") {
  const fs::path dir(ISAC_CONFIGS);
  for (const char *name : {"paper_default.json", "desk.json", "fig3.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(parse_run_config(read_json_file((dir / name).string())));
  }
  const SweepSpec spec = parse_sweep_spec(read_json_file((dir / "fig4_sweep.json").string()));
  CHECK(spec.gamma_db_values == std::vector<double>{10.0, 20.0, 30.0});
  CHECK(spec.n_bs_values == std::vector<int>{32, 64});
  CHECK(spec.seeds.size() == 10u);
}
