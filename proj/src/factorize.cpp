#include "isac/factorize.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

DigitalUpdate update_digital(const cmat &f_rf, const cmat &f_hat) {
  if (f_rf.rows() != f_hat.rows()) {
    throw std::invalid_argument("update_digital: F_RF and F_hat row counts differ");
  }
  const cmat gram = f_rf.adjoint() * f_rf;
  const cmat rhs = f_rf.adjoint() * f_hat;
  Eigen::SelfAdjointEigenSolver<cmat> eig(gram, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();

  DigitalUpdate out;
  if (lmax > 0.0 && lmin > 1e-12 * lmax) {
    out.f_bb = gram.llt().solve(rhs);
    return out;
  }
  const double ridge = 1e-10 * std::max(gram.trace().real() / gram.rows(), 1.0);
  const cmat regularized = gram + ridge * cmat::Identity(gram.rows(), gram.cols());
  out.f_bb = regularized.llt().solve(rhs);
  out.regularized = true;
  return out;
}

double factorization_cost(const cmat &f_rf, const cmat &f_bb, const cmat &f_hat) {
  return 0.5 * (f_hat - f_rf * f_bb).squaredNorm();
}

cmat riemannian_gradient(const cmat &f_rf, const cmat &f_bb, const cmat &f_hat) {
  const cmat egrad = (f_rf * f_bb - f_hat) * f_bb.adjoint();
  const Eigen::ArrayXXd radial = (egrad.array() * f_rf.array().conjugate()).real();
  return egrad.array() - radial.cast<cd>() * f_rf.array();
}

cmat retract(const cmat &x) {
  cmat out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double mag = std::abs(x(i, j));
      if (mag > 0.0) {
        const cd unit = x(i, j) / mag;
        out(i, j) = unit / std::abs(unit);
      } else {
        out(i, j) = 1.0;
      }
    }
  }
  return out;
}

AnalogUpdate update_analog(const cmat &f_bb, const cmat &f_hat, const cmat &current_f_rf,
                           const ManifoldSettings &opt) {
  if (current_f_rf.rows() != f_hat.rows() || current_f_rf.cols() != f_bb.rows() ||
      f_bb.cols() != f_hat.cols()) {
    throw std::invalid_argument("update_analog: shape mismatch");
  }
  AnalogUpdate out;
  out.f_rf = current_f_rf;
  double cost = factorization_cost(out.f_rf, f_bb, f_hat);
  for (; out.steps < opt.max_steps; ++out.steps) {
    const cmat grad = riemannian_gradient(out.f_rf, f_bb, f_hat);
    const double grad_sq = grad.squaredNorm();
    out.grad_norm = std::sqrt(grad_sq);
    if (out.grad_norm < opt.grad_tol) {
      break;
    }
    double step = opt.initial_step;
    bool accepted = false;
    while (step > 1e-20) {
      const cmat trial = retract(out.f_rf - step * grad);
      const double trial_cost = factorization_cost(trial, f_bb, f_hat);
      if (trial_cost <= cost - opt.armijo_slope * step * grad_sq) {
        out.f_rf = trial;
        cost = trial_cost;
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) {
      break;
    }
  }
  out.residual = std::sqrt(2.0 * cost);
  return out;
}

HybridFactors factorize(const cmat &f_hat, const Scenario &scenario, const StopRule &stop,
                        Rng &rng, const ManifoldSettings &opt) {
  stop.validate();
  if (f_hat.rows() != scenario.n_bs || f_hat.cols() != scenario.n_rf()) {
    throw std::invalid_argument("factorize: F_hat must be N_BS x N_RF");
  }
  HybridFactors out;
  const cvec phases = random_unit_modulus(f_hat.size(), rng);
  out.f_rf = Eigen::Map<const cmat>(phases.data(), f_hat.rows(), f_hat.cols());

  for (int iter = 0; iter < stop.max_iters; ++iter) {
    const DigitalUpdate digital = update_digital(out.f_rf, f_hat);
    out.f_bb = digital.f_bb;
    out.regularized = out.regularized || digital.regularized;
    const AnalogUpdate analog = update_analog(out.f_bb, f_hat, out.f_rf, opt);
    out.f_rf = analog.f_rf;

    const double residual = analog.residual;
    const bool has_previous = !out.residual_trace.empty();
    const double previous = has_previous ? out.residual_trace.back() : 0.0;
    out.residual_trace.push_back(residual);

    if (stop.objective_threshold && residual <= *stop.objective_threshold) {
      out.converged = true;
      break;
    }
    if (stop.relative_change_threshold && has_previous &&
        std::abs(previous - residual) <= *stop.relative_change_threshold * previous) {
      out.converged = true;
      break;
    }
  }

  const cmat product = out.f_rf * out.f_bb;
  const double norm = product.norm();
  if (norm > 0.0) {
    out.f_bb *= std::sqrt(scenario.p_t) / norm;
  } else {
    out.normalization_skipped = true;
  }
  out.effective = out.f_rf * out.f_bb;
  return out;
}

} // namespace isac
