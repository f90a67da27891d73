#pragma once

#include <vector>

#include "isac/altmin.hpp"
#include "isac/model.hpp"

namespace isac {

/// Riemannian steepest descent with Armijo backtracking on the product of
/// unit circles.
struct ManifoldSettings {
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo_slope = 1e-4;
  double grad_tol = 1e-6;
  int max_steps = 200;

  bool operator==(const ManifoldSettings &) const = default;
};

struct HybridFactors {
  /// N_BS x N_RF, unit-modulus entries.
  cmat f_rf;
  /// N_RF x N_RF.
  cmat f_bb;
  /// ||F_hat - F_RF F_BB||_F after each alternation, before normalization.
  std::vector<double> residual_trace;
  /// F_RF * F_BB after normalization.
  cmat effective;
  bool converged = false;
  /// A digital update needed the ridge fallback.
  bool regularized = false;
  /// F_RF F_BB was zero, so the power normalization was skipped.
  bool normalization_skipped = false;
};

struct DigitalUpdate {
  cmat f_bb;
  bool regularized = false;
};

/// Least-squares digital beamformer (F_RF' F_RF)^{-1} F_RF' F_hat. Falls back
/// to a small ridge when F_RF is numerically rank deficient.
DigitalUpdate update_digital(const cmat &f_rf, const cmat &f_hat);

struct AnalogUpdate {
  cmat f_rf;
  /// ||F_hat - F_RF F_BB||_F at the returned point.
  double residual = 0.0;
  double grad_norm = 0.0;
  int steps = 0;
};

/// 0.5 ||F_hat - F_RF F_BB||_F^2.
double factorization_cost(const cmat &f_rf, const cmat &f_bb, const cmat &f_hat);

/// Riemannian gradient of factorization_cost at f_rf: the Euclidean gradient
/// (F_RF F_BB - F_hat) F_BB' projected onto the tangent space.
cmat riemannian_gradient(const cmat &f_rf, const cmat &f_bb, const cmat &f_hat);

/// Entrywise x / |x|; zero entries are replaced by 1.
cmat retract(const cmat &x);

AnalogUpdate update_analog(const cmat &f_bb, const cmat &f_hat, const cmat &current_f_rf,
                           const ManifoldSettings &opt = {});

/// Alternating digital/analog updates from a random unit-modulus F_RF, then
/// F_BB is scaled so that ||F_RF F_BB||_F^2 = P_T.
HybridFactors factorize(const cmat &f_hat, const Scenario &scenario, const StopRule &stop,
                        Rng &rng, const ManifoldSettings &opt = {});

/// Default alternation stop rule for factorize.
inline StopRule default_factorization_stop() {
  StopRule rule;
  rule.max_iters = 50;
  rule.relative_change_threshold = 1e-6;
  return rule;
}

} // namespace isac
