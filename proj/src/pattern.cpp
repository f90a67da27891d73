#include "isac/pattern.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

namespace {

// Grid points produced by build_grid can sit exactly on a band edge whose sine
// rounds one ulp inward.
constexpr double kBandEdgeTol = 1e-12;

} // namespace

rvec build_grid(int m) {
  if (m < 2) {
    throw std::invalid_argument("build_grid: need at least 2 points");
  }
  rvec grid(m);
  for (int i = 0; i < m; ++i) {
    grid(i) = -1.0 + 2.0 * static_cast<double>(i + 1) / static_cast<double>(m);
  }
  return grid;
}

double objective_gain(const std::vector<AngleBand> &bands, int n_rf, double p_t) {
  if (bands.empty()) {
    throw std::invalid_argument("objective_bands: band list is empty");
  }
  double measure = 0.0;
  for (const auto &band : bands) {
    const double width = deg_to_sine(band.upper_deg) - deg_to_sine(band.lower_deg);
    if (!(width > 0.0)) {
      throw std::invalid_argument("objective_bands: band has zero measure");
    }
    measure += width;
  }
  return std::sqrt(2.0 * n_rf * p_t / measure);
}

bool in_band(const AngleBand &band, double x) {
  return x >= deg_to_sine(band.lower_deg) - kBandEdgeTol &&
         x <= deg_to_sine(band.upper_deg) + kBandEdgeTol;
}

bool in_any_band(const std::vector<AngleBand> &bands, double x) {
  for (const auto &band : bands) {
    if (in_band(band, x)) {
      return true;
    }
  }
  return false;
}

rvec build_objective(const Scenario &scenario, const rvec &grid) {
  const double gain = objective_gain(scenario.objective_bands, scenario.n_rf(), scenario.p_t);
  rvec b = rvec::Zero(grid.size());
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    if (in_any_band(scenario.objective_bands, grid(m))) {
      b(m) = gain;
    }
  }
  return b;
}

cmat sampling_matrix(int n_bs, const rvec &grid) {
  cmat phi(grid.size(), n_bs);
  const double scale = std::sqrt(static_cast<double>(n_bs));
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    phi.row(m) = scale * steering_vector(n_bs, grid(m)).adjoint();
  }
  return phi;
}

PatternSpec build_pattern_spec(const Scenario &scenario) {
  scenario.validate();
  PatternSpec spec;
  spec.grid = build_grid(scenario.grid_size);
  spec.phi = sampling_matrix(scenario.n_bs, spec.grid);
  spec.b = build_objective(scenario, spec.grid);
  spec.a_diag = spec.b;
  if (scenario.weight_diag.empty()) {
    spec.d_diag = rvec::Ones(scenario.grid_size);
  } else {
    spec.d_diag = Eigen::Map<const rvec>(scenario.weight_diag.data(),
                                         static_cast<Eigen::Index>(scenario.weight_diag.size()));
  }
  return spec;
}

rvec beam_pattern(const cmat &phi, const cvec &f_sum) {
  if (phi.cols() != f_sum.size()) {
    throw std::invalid_argument("beam_pattern: sampling matrix and beam sizes differ");
  }
  return (phi * f_sum).cwiseAbs();
}

double pattern_mse(const cmat &phi, const cmat &f_list, const rvec &b, int n_rf, double p_t) {
  if (phi.cols() != f_list.rows() || phi.rows() != b.size()) {
    throw std::invalid_argument("pattern_mse: shape mismatch");
  }
  const cvec f_sum = f_list.rowwise().sum();
  return (beam_pattern(phi, f_sum) - b).squaredNorm() / (n_rf * p_t);
}

} // namespace isac
