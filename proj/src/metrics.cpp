#include "isac/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

std::vector<double> sinr(const ChannelSet &channels, const cmat &f_columns, double noise_power) {
  const Eigen::Index n_c = channels.h.rows();
  if (channels.h.cols() != f_columns.rows() || f_columns.cols() < n_c) {
    throw std::invalid_argument("sinr: channel and beamformer shapes do not conform");
  }
  const cmat received = channels.h * f_columns;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_c));
  for (Eigen::Index n = 0; n < n_c; ++n) {
    const double signal = std::norm(received(n, n));
    const double interference = received.row(n).squaredNorm() - signal;
    out.push_back(signal / (interference + noise_power));
  }
  return out;
}

double power_db(double x) {
  if (!(x > 0.0)) {
    return kDbFloor;
  }
  return std::max(kDbFloor, 10.0 * std::log10(x));
}

rvec pattern_dbi(const rvec &magnitude, int n_rf, double p_t) {
  const double scale = std::sqrt(n_rf * p_t);
  rvec out(magnitude.size());
  for (Eigen::Index i = 0; i < magnitude.size(); ++i) {
    const double ratio = magnitude(i) / scale;
    out(i) = ratio > 0.0 ? std::max(kDbFloor, 20.0 * std::log10(ratio)) : kDbFloor;
  }
  return out;
}

double in_band_energy_fraction(const rvec &magnitude, const rvec &b) {
  if (magnitude.size() != b.size()) {
    throw std::invalid_argument("in_band_energy_fraction: length mismatch");
  }
  const double total = magnitude.squaredNorm();
  if (!(total > 0.0)) {
    return 0.0;
  }
  double in = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (b(i) > 0.0) {
      in += magnitude(i) * magnitude(i);
    }
  }
  return in / total;
}

EvaluationReport evaluate(const BeamDesign &design, const HybridFactors &factors,
                          const ChannelSet &channels, const PatternSpec &pattern,
                          const Scenario &scenario) {
  const int n_rf = scenario.n_rf();
  EvaluationReport report;
  report.objective_dbi = pattern_dbi(pattern.b, n_rf, scenario.p_t);

  const cmat zero = cmat::Zero(scenario.n_bs, n_rf);
  const cmat &f_hat = design.f_list.size() > 0 ? design.f_list : zero;
  const cmat &f_eff = factors.effective.size() > 0 ? factors.effective : zero;

  report.mse_no_hbf = pattern_mse(pattern.phi, f_hat, pattern.b, n_rf, scenario.p_t);
  report.mse_hbf = pattern_mse(pattern.phi, f_eff, pattern.b, n_rf, scenario.p_t);
  report.dtb_dbi =
      pattern_dbi(beam_pattern(pattern.phi, f_hat.rowwise().sum()), n_rf, scenario.p_t);
  report.dtb_hbf_dbi =
      pattern_dbi(beam_pattern(pattern.phi, f_eff.rowwise().sum()), n_rf, scenario.p_t);

  const std::vector<double> no_hbf = sinr(channels, f_hat, scenario.noise_power);
  const std::vector<double> hbf = sinr(channels, f_eff, scenario.noise_power);
  for (std::size_t n = 0; n < no_hbf.size(); ++n) {
    report.sinr_no_hbf_db.push_back(power_db(no_hbf[n]));
    report.sinr_hbf_db.push_back(power_db(hbf[n]));
    report.feasible.push_back(no_hbf[n] >=
                              scenario.sinr_thresholds[n] * (1.0 - kSinrFeasibilitySlack));
  }
  return report;
}

} // namespace isac
