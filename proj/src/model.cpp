#include "isac/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isac {

namespace {

void require(bool ok, const std::string &field, const std::string &why) {
  if (!ok) {
    throw std::invalid_argument(field + ": " + why);
  }
}

} // namespace

void Scenario::validate() const {
  require(n_bs >= 1, "n_bs", "must be a positive integer");
  require(n_c >= 1, "n_c", "must be a positive integer");
  require(n_t >= 0, "n_t", "must be non-negative");
  require(std::isfinite(p_t) && p_t > 0.0, "p_t", "must be positive");
  require(std::isfinite(noise_power) && noise_power > 0.0, "noise_power",
          "must be positive");
  require(static_cast<int>(sinr_thresholds.size()) == n_c, "sinr_thresholds",
          "needs one entry per user");
  for (double g : sinr_thresholds) {
    require(std::isfinite(g) && g > 0.0, "sinr_thresholds", "entries must be positive");
  }
  require(grid_size >= 2, "grid_size", "must be at least 2");
  require(!objective_bands.empty(), "objective_bands", "must not be empty");
  for (const auto &band : objective_bands) {
    require(band.lower_deg > -90.0 && band.upper_deg <= 90.0, "objective_bands",
            "bands must lie within (-90, 90] degrees");
    require(band.lower_deg < band.upper_deg, "objective_bands",
            "each band needs lower < upper");
  }
  for (std::size_t i = 0; i < objective_bands.size(); ++i) {
    for (std::size_t j = i + 1; j < objective_bands.size(); ++j) {
      const auto &a = objective_bands[i];
      const auto &b = objective_bands[j];
      require(a.upper_deg <= b.lower_deg || b.upper_deg <= a.lower_deg,
              "objective_bands", "bands must not overlap");
    }
  }
  require(weight_diag.empty() || static_cast<int>(weight_diag.size()) == grid_size,
          "weight_diag", "needs grid_size entries or none");
  for (double w : weight_diag) {
    require(std::isfinite(w) && w >= 0.0, "weight_diag", "entries must be non-negative");
  }
  require(static_cast<int>(user_angles_deg.size()) == n_c, "user_angles_deg",
          "needs one entry per user");
  for (double a : user_angles_deg) {
    require(a >= -90.0 && a <= 90.0, "user_angles_deg", "angles must lie within [-90, 90]");
  }
  require(nlos_paths_per_user >= 0, "nlos_paths_per_user", "must be non-negative");
  require(std::isfinite(nlos_gain_variance) && nlos_gain_variance >= 0.0,
          "nlos_gain_variance", "must be non-negative");
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

cvec steering_vector(int n, double theta) {
  if (n < 1) {
    throw std::invalid_argument("steering_vector: antenna count must be >= 1");
  }
  cvec a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    a(k) = std::polar(scale, kPi * k * theta);
  }
  return a;
}

cd complex_normal(Rng &rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

Eigen::RowVectorXcd channel_from_paths(int n_bs, const std::vector<PathParams> &paths) {
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(n_bs);
  if (paths.empty()) {
    return row;
  }
  for (const auto &path : paths) {
    row += path.gain * steering_vector(n_bs, path.aod).adjoint();
  }
  row *= std::sqrt(static_cast<double>(n_bs) / static_cast<double>(paths.size()));
  return row;
}

ChannelSet generate_channels(const Scenario &scenario, Rng &rng) {
  scenario.validate();
  ChannelSet set;
  set.h.resize(scenario.n_c, scenario.n_bs);
  set.paths.resize(scenario.n_c);
  std::uniform_real_distribution<double> uniform_aod(-1.0, 1.0);
  for (int n = 0; n < scenario.n_c; ++n) {
    auto &paths = set.paths[n];
    paths.push_back({complex_normal(rng, 1.0), deg_to_sine(scenario.user_angles_deg[n])});
    for (int l = 0; l < scenario.nlos_paths_per_user; ++l) {
      const cd gain = complex_normal(rng, scenario.nlos_gain_variance);
      paths.push_back({gain, uniform_aod(rng)});
    }
    set.h.row(n) = channel_from_paths(scenario.n_bs, paths);
  }
  return set;
}

cvec random_unit_modulus(Eigen::Index n, Rng &rng) {
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  cvec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = std::polar(1.0, phase(rng));
  }
  return v;
}

} // namespace isac
