#include "isac/phase.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

cmat precompute_w(const PatternSpec &pattern) {
  // (A' D' D A)^{-1} A' D' D Phi is diagonal-times-Phi: row m is
  // (d_m^2 b_m / (d_m^2 b_m^2)) Phi_m = Phi_m / b_m on the support.
  cmat w = cmat::Zero(pattern.phi.rows(), pattern.phi.cols());
  for (Eigen::Index m = 0; m < pattern.phi.rows(); ++m) {
    const double a = pattern.a_diag(m);
    const double d2 = pattern.d_diag(m) * pattern.d_diag(m);
    if (a > 0.0 && d2 > 0.0) {
      w.row(m) = (d2 * a / (d2 * a * a)) * pattern.phi.row(m);
    }
  }
  return w;
}

cvec update_phase(const cmat &w, const cmat &f_list, const cvec &previous_p) {
  if (w.cols() != f_list.rows() || w.rows() != previous_p.size()) {
    throw std::invalid_argument("update_phase: shape mismatch");
  }
  const cvec p_tilde = w * f_list.rowwise().sum();
  cvec p_hat = previous_p;
  for (Eigen::Index i = 0; i < p_tilde.size(); ++i) {
    const double mag = std::abs(p_tilde(i));
    if (mag > kPhaseZeroTol) {
      cd unit = p_tilde(i) / mag;
      p_hat(i) = unit / std::abs(unit);
    }
  }
  return p_hat;
}

double phase_objective(const PatternSpec &pattern, const cvec &f_sum, const cvec &p) {
  const cvec residual = pattern.phi * f_sum - pattern.a_diag.cast<cd>().cwiseProduct(p);
  return pattern.d_diag.cast<cd>().cwiseProduct(residual).norm();
}

} // namespace isac
