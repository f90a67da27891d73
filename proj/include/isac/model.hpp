#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace isac {

using cd = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

/// Random source used by every randomized stage. Seeded once per run.
using Rng = std::mt19937_64;

/// Closed angular interval in degrees, lower < upper, inside (-90, 90].
struct AngleBand {
  double lower_deg = 0.0;
  double upper_deg = 0.0;

  bool operator==(const AngleBand &) const = default;
};

/// Full experiment configuration. Powers are linear milliwatts and SINR
/// thresholds are linear ratios; dB values are converted at ingestion.
struct Scenario {
  int n_bs = 128;
  int n_c = 3;
  int n_t = 0;
  double p_t = 100.0;
  double noise_power = 1.0;
  std::vector<double> sinr_thresholds{1000.0, 1000.0, 1000.0};
  int grid_size = 400;
  std::vector<AngleBand> objective_bands{{10.0, 30.0}, {40.0, 60.0}};
  /// Diagonal of the weight matrix D. Empty means identity.
  std::vector<double> weight_diag;
  std::vector<double> user_angles_deg{-70.0, -40.0, -10.0};
  int nlos_paths_per_user = 2;
  double nlos_gain_variance = 0.01;
  std::uint64_t rng_seed = 1;

  int n_rf() const { return n_c + n_t; }

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  bool operator==(const Scenario &) const = default;
};

struct PathParams {
  cd gain;
  /// Angle of departure in sine space, [-1, 1].
  double aod = 0.0;
};

/// Stacked user channels. Row n of h is the 1 x N_BS channel of user n.
struct ChannelSet {
  cmat h;
  std::vector<std::vector<PathParams>> paths;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
double db_to_linear(double db);
double linear_to_db(double x);

constexpr double kPi = 3.14159265358979323846;
inline double deg_to_sine(double deg) { return std::sin(deg * kPi / 180.0); }

/// ULA response toward sine-space angle theta: entry k is
/// exp(j*pi*k*theta)/sqrt(n).
cvec steering_vector(int n, double theta);

/// Draws CN(0, variance): independent real and imaginary parts, each with
/// variance/2.
cd complex_normal(Rng &rng, double variance);

/// Builds user n's channel row from its path list.
Eigen::RowVectorXcd channel_from_paths(int n_bs, const std::vector<PathParams> &paths);

/// One LoS path toward each user angle plus NLoS paths with uniform sine-space
/// AoDs.
ChannelSet generate_channels(const Scenario &scenario, Rng &rng);

/// Uniform phases on the unit circle.
cvec random_unit_modulus(Eigen::Index n, Rng &rng);

} // namespace isac
