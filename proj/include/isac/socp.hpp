#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace isac {

/// Dense second-order cone program in standard form
///
///   minimize    c'x
///   subject to  G x + s = h,  A x = b,  s in K = Q_1 x ... x Q_k
///
/// where Q_i = { (s0, s1) : s0 >= ||s1|| } and cone_dims lists dim(Q_i) in row
/// order of G.
struct ConeProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<int> cone_dims;
};

struct SocpSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  /// Looser thresholds accepted when the solver stalls or runs out of
  /// iterations.
  double feastol_inaccurate = 1e-6;
  double reltol_inaccurate = 1e-6;
  int max_iters = 100;
  double step_fraction = 0.99;
  /// Upper bound on iterative-refinement passes per KKT solve. Refinement
  /// stops early once the residual stops shrinking.
  int refinement_steps = 20;
};

enum class SocpStatus { optimal, near_optimal, primal_infeasible, dual_infeasible, failed };

std::string_view to_string(SocpStatus status);

struct SocpResult {
  SocpStatus status = SocpStatus::failed;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  Eigen::VectorXd z;
  double primal_cost = 0.0;
  double dual_cost = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and a Mehrotra predictor-corrector. Dense
/// linear algebra throughout.
SocpResult solve_socp(const ConeProgram &program, const SocpSettings &settings = {});

namespace detail {

/// Nesterov-Todd scaling W = eta * [[a, q'], [q, I + q q' / (1 + a)]] of one
/// cone, satisfying W z = W^{-1} s.
struct NtScaling {
  double eta = 1.0;
  double a = 1.0;
  Eigen::VectorXd q;

  static NtScaling identity(int dim);
  static NtScaling compute(const Eigen::Ref<const Eigen::VectorXd> &s,
                           const Eigen::Ref<const Eigen::VectorXd> &z);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd> &v) const;
  Eigen::VectorXd apply_inverse(const Eigen::Ref<const Eigen::VectorXd> &v) const;
  /// W^{-1} applied to each column.
  Eigen::MatrixXd apply_inverse_columns(const Eigen::Ref<const Eigen::MatrixXd> &m) const;
  Eigen::VectorXd apply_squared(const Eigen::Ref<const Eigen::VectorXd> &v) const;
  Eigen::VectorXd apply_inverse_squared(const Eigen::Ref<const Eigen::VectorXd> &v) const;
};

/// s0 - ||s1||; positive iff s is in the cone interior.
double cone_margin(const Eigen::Ref<const Eigen::VectorXd> &s);

/// Largest alpha >= 0 with u + alpha * d in the cone (u interior). Returns
/// +inf when the ray never leaves.
double max_cone_step(const Eigen::Ref<const Eigen::VectorXd> &u,
                     const Eigen::Ref<const Eigen::VectorXd> &d);

} // namespace detail

} // namespace isac
