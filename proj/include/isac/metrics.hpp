#pragma once

#include <vector>

#include "isac/altmin.hpp"
#include "isac/factorize.hpp"
#include "isac/model.hpp"
#include "isac/pattern.hpp"

namespace isac {

/// Floor applied to dB values of zero or negative quantities in exported tables.
constexpr double kDbFloor = -120.0;

/// Achieved SINR per communication user. Columns of f_columns beyond N_c only
/// act as interference.
std::vector<double> sinr(const ChannelSet &channels, const cmat &f_columns, double noise_power);

/// 10 log10(x), floored at kDbFloor.
double power_db(double x);

/// 20 log10(|v| / sqrt(n_rf p_t)) per entry, floored at kDbFloor.
rvec pattern_dbi(const rvec &magnitude, int n_rf, double p_t);

/// Share of sum_m |v_m|^2 that falls on grid points where b_m > 0. Zero when
/// the pattern carries no energy.
double in_band_energy_fraction(const rvec &magnitude, const rvec &b);

struct EvaluationReport {
  std::vector<double> sinr_no_hbf_db;
  std::vector<double> sinr_hbf_db;
  double mse_no_hbf = 0.0;
  double mse_hbf = 0.0;
  rvec objective_dbi;
  rvec dtb_dbi;
  rvec dtb_hbf_dbi;
  /// Gamma_n satisfied by the fully digital design, per user.
  std::vector<bool> feasible;
};

/// Relative slack on the threshold check for the feasibility flags.
constexpr double kSinrFeasibilitySlack = 1e-6;

EvaluationReport evaluate(const BeamDesign &design, const HybridFactors &factors,
                          const ChannelSet &channels, const PatternSpec &pattern,
                          const Scenario &scenario);

} // namespace isac
