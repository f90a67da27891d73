#include "isac/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isac {

std::string_view to_string(SocpStatus status) {
  switch (status) {
  case SocpStatus::optimal:
    return "optimal";
  case SocpStatus::near_optimal:
    return "near-optimal";
  case SocpStatus::primal_infeasible:
    return "infeasible";
  case SocpStatus::dual_infeasible:
    return "unbounded";
  case SocpStatus::failed:
    return "failed";
  }
  return "failed";
}

namespace detail {

using Eigen::MatrixXd;
using Eigen::Ref;
using Eigen::VectorXd;

double cone_margin(const Ref<const VectorXd> &s) { return s(0) - s.tail(s.size() - 1).norm(); }

namespace {

// s0^2 - ||s1||^2 evaluated as a product to limit cancellation.
double cone_det(const Ref<const VectorXd> &s) {
  const double tail = s.tail(s.size() - 1).norm();
  return (s(0) - tail) * (s(0) + tail);
}

} // namespace

NtScaling NtScaling::identity(int dim) {
  NtScaling w;
  w.eta = 1.0;
  w.a = 1.0;
  w.q = VectorXd::Zero(dim - 1);
  return w;
}

NtScaling NtScaling::compute(const Ref<const VectorXd> &s, const Ref<const VectorXd> &z) {
  const double s_det = cone_det(s);
  const double z_det = cone_det(z);
  const VectorXd s_bar = s / std::sqrt(s_det);
  const VectorXd z_bar = z / std::sqrt(z_det);
  const double gamma = std::sqrt(0.5 * (1.0 + s_bar.dot(z_bar)));
  NtScaling w;
  w.eta = std::pow(s_det / z_det, 0.25);
  w.a = (s_bar(0) + z_bar(0)) / (2.0 * gamma);
  w.q = (s_bar.tail(s.size() - 1) - z_bar.tail(z.size() - 1)) / (2.0 * gamma);
  return w;
}

VectorXd NtScaling::apply(const Ref<const VectorXd> &v) const {
  const Eigen::Index n = v.size() - 1;
  const double v0 = v(0);
  const double qv = q.dot(v.tail(n));
  VectorXd out(v.size());
  out(0) = a * v0 + qv;
  out.tail(n) = v.tail(n) + (v0 + qv / (1.0 + a)) * q;
  return eta * out;
}

VectorXd NtScaling::apply_inverse(const Ref<const VectorXd> &v) const {
  const Eigen::Index n = v.size() - 1;
  const double v0 = v(0);
  const double qv = q.dot(v.tail(n));
  VectorXd out(v.size());
  out(0) = a * v0 - qv;
  out.tail(n) = v.tail(n) + (-v0 + qv / (1.0 + a)) * q;
  return out / eta;
}

MatrixXd NtScaling::apply_inverse_columns(const Ref<const MatrixXd> &m) const {
  const Eigen::Index n = m.rows() - 1;
  const Eigen::RowVectorXd m0 = m.row(0);
  const Eigen::RowVectorXd qm = q.transpose() * m.bottomRows(n);
  MatrixXd out(m.rows(), m.cols());
  out.row(0) = a * m0 - qm;
  out.bottomRows(n) = m.bottomRows(n) + q * (qm / (1.0 + a) - m0);
  return out / eta;
}

VectorXd NtScaling::apply_squared(const Ref<const VectorXd> &v) const {
  // W^2 = eta^2 (2 w w' - J) with w = (a, q).
  const Eigen::Index n = v.size() - 1;
  const double wv = a * v(0) + q.dot(v.tail(n));
  VectorXd out(v.size());
  out(0) = 2.0 * a * wv - v(0);
  out.tail(n) = 2.0 * wv * q + v.tail(n);
  return eta * eta * out;
}

VectorXd NtScaling::apply_inverse_squared(const Ref<const VectorXd> &v) const {
  // W^{-2} = eta^{-2} (2 w~ w~' - J) with w~ = (a, -q).
  const Eigen::Index n = v.size() - 1;
  const double wv = a * v(0) - q.dot(v.tail(n));
  VectorXd out(v.size());
  out(0) = 2.0 * a * wv - v(0);
  out.tail(n) = -2.0 * wv * q + v.tail(n);
  return out / (eta * eta);
}

double max_cone_step(const Ref<const VectorXd> &u, const Ref<const VectorXd> &d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = u.size() - 1;
  const double qa = d(0) * d(0) - d.tail(n).squaredNorm();
  const double qb = 2.0 * (u(0) * d(0) - u.tail(n).dot(d.tail(n)));
  const double qc = cone_det(u);
  if (qc <= 0.0) {
    return 0.0;
  }
  const double scale = std::max({std::abs(qa), std::abs(qb), qc});
  if (std::abs(qa) <= 1e-14 * scale) {
    return qb < 0.0 ? -qc / qb : inf;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    return inf;
  }
  const double t = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  double best = inf;
  for (double root : {t / qa, t != 0.0 ? qc / t : inf}) {
    if (root > 0.0 && root < best) {
      best = root;
    }
  }
  return best;
}

} // namespace detail

namespace {

using detail::NtScaling;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ConeLayout {
  std::vector<Eigen::Index> offset;
  std::vector<Eigen::Index> dim;

  explicit ConeLayout(const std::vector<int> &dims) {
    Eigen::Index o = 0;
    for (int d : dims) {
      offset.push_back(o);
      dim.push_back(d);
      o += d;
    }
  }
  std::size_t count() const { return dim.size(); }
};

// Conic product u o v = (u'v, u0 v1 + v0 u1), conewise.
VectorXd cone_product(const ConeLayout &cones, const VectorXd &u, const VectorXd &v) {
  VectorXd out(u.size());
  for (std::size_t k = 0; k < cones.count(); ++k) {
    const auto o = cones.offset[k];
    const auto n = cones.dim[k];
    const auto uk = u.segment(o, n);
    const auto vk = v.segment(o, n);
    out(o) = uk.dot(vk);
    out.segment(o + 1, n - 1) = uk(0) * vk.tail(n - 1) + vk(0) * uk.tail(n - 1);
  }
  return out;
}

// Solves lambda o u = v, conewise.
VectorXd cone_divide(const ConeLayout &cones, const VectorXd &lambda, const VectorXd &v) {
  VectorXd out(v.size());
  for (std::size_t k = 0; k < cones.count(); ++k) {
    const auto o = cones.offset[k];
    const auto n = cones.dim[k];
    const auto l = lambda.segment(o, n);
    const auto vk = v.segment(o, n);
    const double rho = l(0) * l(0) - l.tail(n - 1).squaredNorm();
    const double u0 = (l(0) * vk(0) - l.tail(n - 1).dot(vk.tail(n - 1))) / rho;
    out(o) = u0;
    out.segment(o + 1, n - 1) = (vk.tail(n - 1) - u0 * l.tail(n - 1)) / l(0);
  }
  return out;
}

VectorXd identity_element(const ConeLayout &cones, Eigen::Index m) {
  VectorXd e = VectorXd::Zero(m);
  for (auto o : cones.offset) {
    e(o) = 1.0;
  }
  return e;
}

// Shifts v into the cone interior by a common multiple of the identity.
VectorXd shift_into_cone(const ConeLayout &cones, const VectorXd &v) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cones.count(); ++k) {
    worst = std::max(worst, -detail::cone_margin(v.segment(cones.offset[k], cones.dim[k])));
  }
  if (worst < 0.0) {
    return v;
  }
  return v + (1.0 + worst) * identity_element(cones, v.size());
}

class KktSystem {
public:
  KktSystem(const ConeProgram &program, const ConeLayout &cones)
      : prog_(program), cones_(cones) {}

  bool factor(const std::vector<NtScaling> &scalings) {
    scalings_ = &scalings;
    const Eigen::Index n = prog_.G.cols();
    MatrixXd h = MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < cones_.count(); ++k) {
      const MatrixXd scaled =
          scalings[k].apply_inverse_columns(prog_.G.middleRows(cones_.offset[k], cones_.dim[k]));
      h.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    }
    const double diag_max = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    h.diagonal().array() += 1e-14 * diag_max;
    llt_.compute(h);
    if (llt_.info() != Eigen::Success) {
      return false;
    }
    if (prog_.A.rows() > 0) {
      h_inv_at_ = llt_.solve(prog_.A.transpose());
      schur_.compute(prog_.A * h_inv_at_);
      if (schur_.info() != Eigen::Success) {
        return false;
      }
    }
    return true;
  }

  // Solves [0 A' G'; A 0 0; G 0 -W^2] (x, y, z) = (r1, r2, r3).
  void solve(const VectorXd &r1, const VectorXd &r2, const VectorXd &r3, VectorXd &x, VectorXd &y,
             VectorXd &z, int refinement_steps) const {
    solve_once(r1, r2, r3, x, y, z);
    const double scale = 1.0 + std::max({r1.norm(), r2.norm(), r3.norm()});
    VectorXd e1, e2, e3;
    auto error = [&]() {
      e1 = r1 - prog_.A.transpose() * y - prog_.G.transpose() * z;
      e2 = r2 - prog_.A * x;
      e3 = r3 - (prog_.G * x - apply_w2(z));
      return std::max({e1.norm(), e2.norm(), e3.norm()});
    };
    double err = error();
    for (int i = 0; i < refinement_steps && err > 1e-14 * scale; ++i) {
      VectorXd dx, dy, dz;
      solve_once(e1, e2, e3, dx, dy, dz);
      x += dx;
      y += dy;
      z += dz;
      const double previous = err;
      err = error();
      if (err > 0.5 * previous) {
        if (err > previous) {
          x -= dx;
          y -= dy;
          z -= dz;
        }
        break;
      }
    }
  }

  VectorXd apply_w(const VectorXd &v) const { return apply_each(v, &NtScaling::apply); }
  VectorXd apply_w2(const VectorXd &v) const { return apply_each(v, &NtScaling::apply_squared); }

private:
  using ConeOp = Eigen::VectorXd (NtScaling::*)(const Eigen::Ref<const Eigen::VectorXd> &) const;

  VectorXd apply_each(const VectorXd &v, ConeOp op) const {
    VectorXd out(v.size());
    for (std::size_t k = 0; k < cones_.count(); ++k) {
      out.segment(cones_.offset[k], cones_.dim[k]) =
          ((*scalings_)[k].*op)(v.segment(cones_.offset[k], cones_.dim[k]));
    }
    return out;
  }

  void solve_once(const VectorXd &r1, const VectorXd &r2, const VectorXd &r3, VectorXd &x,
                  VectorXd &y, VectorXd &z) const {
    const VectorXd w_inv2_r3 = apply_each(r3, &NtScaling::apply_inverse_squared);
    const VectorXd t = r1 + prog_.G.transpose() * w_inv2_r3;
    x = llt_.solve(t);
    if (prog_.A.rows() > 0) {
      y = schur_.solve(prog_.A * x - r2);
      x -= h_inv_at_ * y;
    } else {
      y.resize(0);
    }
    z = apply_each(prog_.G * x - r3, &NtScaling::apply_inverse_squared);
  }

  const ConeProgram &prog_;
  const ConeLayout &cones_;
  const std::vector<NtScaling> *scalings_ = nullptr;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LLT<MatrixXd> schur_;
  MatrixXd h_inv_at_;
};

void check_program(const ConeProgram &p) {
  const Eigen::Index n = p.c.size();
  if (p.G.cols() != n || p.G.rows() != p.h.size()) {
    throw std::invalid_argument("solve_socp: G/h dimensions do not match");
  }
  if (p.A.rows() != p.b.size() || (p.A.rows() > 0 && p.A.cols() != n)) {
    throw std::invalid_argument("solve_socp: A/b dimensions do not match");
  }
  Eigen::Index total = 0;
  for (int d : p.cone_dims) {
    if (d < 1) {
      throw std::invalid_argument("solve_socp: cone dimensions must be positive");
    }
    total += d;
  }
  if (total != p.G.rows() || p.cone_dims.empty()) {
    throw std::invalid_argument("solve_socp: cone dimensions must cover the rows of G");
  }
}

} // namespace

SocpResult solve_socp(const ConeProgram &program, const SocpSettings &settings) {
  check_program(program);
  ConeProgram prog = program;
  if (prog.A.rows() == 0) {
    prog.A.resize(0, prog.c.size());
  }
  const ConeLayout cones(prog.cone_dims);
  const Eigen::Index n = prog.c.size();
  const Eigen::Index m = prog.G.rows();
  const Eigen::Index p = prog.A.rows();
  const double degree = static_cast<double>(cones.count()) + 1.0;

  const double c_norm = std::max(1.0, prog.c.norm());
  const double b_norm = std::max(1.0, prog.b.norm());
  const double h_norm = std::max(1.0, prog.h.norm());

  SocpResult result;
  KktSystem kkt(prog, cones);

  std::vector<NtScaling> scalings;
  for (auto d : cones.dim) {
    scalings.push_back(NtScaling::identity(static_cast<int>(d)));
  }
  if (!kkt.factor(scalings)) {
    return result;
  }

  VectorXd x, y, z, s;
  {
    VectorXd z_hat;
    kkt.solve(VectorXd::Zero(n), prog.b, prog.h, x, y, z_hat, settings.refinement_steps);
    s = shift_into_cone(cones, -z_hat);
    VectorXd x_dual;
    kkt.solve(-prog.c, VectorXd::Zero(p), VectorXd::Zero(m), x_dual, y, z_hat,
              settings.refinement_steps);
    z = shift_into_cone(cones, z_hat);
  }
  double tau = 1.0;
  double kappa = 1.0;

  const VectorXd e = identity_element(cones, m);

  auto step_length = [&](const VectorXd &lambda, const VectorXd &ds_scaled,
                         const VectorXd &dz_scaled, double dtau, double dkappa) {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cones.count(); ++k) {
      const auto o = cones.offset[k];
      const auto d = cones.dim[k];
      alpha = std::min(alpha, detail::max_cone_step(lambda.segment(o, d), ds_scaled.segment(o, d)));
      alpha = std::min(alpha, detail::max_cone_step(lambda.segment(o, d), dz_scaled.segment(o, d)));
    }
    if (dtau < 0.0) {
      alpha = std::min(alpha, -tau / dtau);
    }
    if (dkappa < 0.0) {
      alpha = std::min(alpha, -kappa / dkappa);
    }
    return alpha;
  };

  auto record = [&](SocpStatus status, int iters) {
    result.status = status;
    result.iterations = iters;
    if (status == SocpStatus::primal_infeasible) {
      const double scale = -(prog.h.dot(z) + prog.b.dot(y));
      result.x.resize(0);
      result.s.resize(0);
      result.y = y / scale;
      result.z = z / scale;
      return;
    }
    if (status == SocpStatus::dual_infeasible) {
      const double scale = -prog.c.dot(x);
      result.x = x / scale;
      result.s = s / scale;
      result.y.resize(0);
      result.z.resize(0);
      return;
    }
    result.x = x / tau;
    result.y = y / tau;
    result.s = s / tau;
    result.z = z / tau;
  };

  auto near_optimal = [&]() {
    const bool gap_ok = result.gap <= settings.abstol ||
                        (std::abs(result.primal_cost) > 0.0 &&
                         result.gap / std::max(std::abs(result.primal_cost), std::abs(result.dual_cost)) <=
                             settings.reltol_inaccurate);
    return result.primal_residual <= settings.feastol_inaccurate &&
           result.dual_residual <= settings.feastol_inaccurate && gap_ok;
  };

  struct Snapshot {
    VectorXd x, y, z, s;
    double tau = 0.0, kappa = 0.0;
    double merit = std::numeric_limits<double>::infinity();
    int iter = 0;
    SocpResult summary;
  } best;

  for (int iter = 0; iter <= settings.max_iters; ++iter) {
    // Residuals of the homogeneous embedding.
    const VectorXd rx = -prog.A.transpose() * y - prog.G.transpose() * z - prog.c * tau;
    const VectorXd ry = prog.A * x - prog.b * tau;
    const VectorXd rz = s + prog.G * x - prog.h * tau;
    const double cx = prog.c.dot(x);
    const double by_hz = prog.b.dot(y) + prog.h.dot(z);
    const double rt = kappa + cx + by_hz;

    if (!rx.allFinite() || !rz.allFinite() || !std::isfinite(rt)) {
      result.status = SocpStatus::failed;
      result.iterations = iter;
      return result;
    }

    result.primal_cost = cx / tau;
    result.dual_cost = -by_hz / tau;
    result.gap = s.dot(z) / (tau * tau);
    result.primal_residual =
        std::max(ry.norm() / (tau * b_norm), (prog.G * x + s - prog.h * tau).norm() / (tau * h_norm));
    result.dual_residual = rx.norm() / (tau * c_norm);

    double rel_gap = std::numeric_limits<double>::infinity();
    if (result.primal_cost < 0.0) {
      rel_gap = result.gap / -result.primal_cost;
    } else if (result.dual_cost > 0.0) {
      rel_gap = result.gap / result.dual_cost;
    }

    if (result.primal_residual <= settings.feastol && result.dual_residual <= settings.feastol &&
        (result.gap <= settings.abstol || rel_gap <= settings.reltol)) {
      record(SocpStatus::optimal, iter);
      return result;
    }
    // Late steps on nearly degenerate programs can lose accuracy; remember
    // the best acceptable point seen so far.
    const double merit = std::max(result.primal_residual, result.dual_residual);
    if (tau > 0.0 && near_optimal() && merit < best.merit) {
      best = {x, y, z, s, tau, kappa, merit, iter, result};
    }
    if (by_hz < 0.0) {
      const double cert = (prog.A.transpose() * y + prog.G.transpose() * z).norm() / -by_hz;
      if (cert <= settings.feastol) {
        record(SocpStatus::primal_infeasible, iter);
        return result;
      }
    }
    if (cx < 0.0) {
      const double res = std::max((prog.A * x).norm(), (prog.G * x + s).norm()) / -cx;
      if (res <= settings.feastol) {
        record(SocpStatus::dual_infeasible, iter);
        return result;
      }
    }
    if (iter == settings.max_iters) {
      break;
    }

    // Scaling and factorization.
    for (std::size_t k = 0; k < cones.count(); ++k) {
      const auto o = cones.offset[k];
      const auto d = cones.dim[k];
      scalings[k] = NtScaling::compute(s.segment(o, d), z.segment(o, d));
    }
    if (!kkt.factor(scalings)) {
      break;
    }
    const VectorXd lambda = kkt.apply_w(z);
    const double mu = (s.dot(z) + tau * kappa) / degree;

    VectorXd x1, y1, z1;
    kkt.solve(-prog.c, prog.b, prog.h, x1, y1, z1, settings.refinement_steps);
    const double denom = prog.c.dot(x1) + prog.b.dot(y1) + prog.h.dot(z1) - kappa / tau;

    struct Direction {
      VectorXd dx, dy, dz, ds, ds_scaled, dz_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };

    auto direction = [&](double residual_weight, const VectorXd &rhs_s, double rhs_kappa) {
      Direction d;
      const VectorXd d_s = cone_divide(cones, lambda, rhs_s);
      VectorXd x2, y2, z2;
      kkt.solve(residual_weight * rx, -residual_weight * ry,
                -residual_weight * rz - kkt.apply_w(d_s), x2, y2, z2, settings.refinement_steps);
      d.dtau = (-residual_weight * rt - rhs_kappa / tau -
                (prog.c.dot(x2) + prog.b.dot(y2) + prog.h.dot(z2))) /
               denom;
      d.dx = x2 + d.dtau * x1;
      d.dy = y2 + d.dtau * y1;
      d.dz = z2 + d.dtau * z1;
      d.dz_scaled = kkt.apply_w(d.dz);
      d.ds_scaled = d_s - d.dz_scaled;
      d.ds = kkt.apply_w(d.ds_scaled);
      d.dkappa = (rhs_kappa - kappa * d.dtau) / tau;
      return d;
    };

    // Predictor.
    const VectorXd lambda_sq = cone_product(cones, lambda, lambda);
    const Direction affine = direction(1.0, -lambda_sq, -tau * kappa);
    const double alpha_aff =
        std::min(1.0, step_length(lambda, affine.ds_scaled, affine.dz_scaled, affine.dtau,
                                  affine.dkappa));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector.
    const VectorXd rhs_s = -lambda_sq + sigma * mu * e -
                           cone_product(cones, affine.ds_scaled, affine.dz_scaled);
    const double rhs_kappa = -tau * kappa + sigma * mu - affine.dtau * affine.dkappa;
    const Direction step = direction(1.0 - sigma, rhs_s, rhs_kappa);
    const double alpha_max =
        step_length(lambda, step.ds_scaled, step.dz_scaled, step.dtau, step.dkappa);
    const double alpha = std::min(1.0, settings.step_fraction * alpha_max);
    if (!(alpha > 1e-12)) {
      break;
    }

    const VectorXd x_next = x + alpha * step.dx;
    const VectorXd y_next = y + alpha * step.dy;
    const VectorXd z_next = z + alpha * step.dz;
    const VectorXd s_next = s + alpha * step.ds;
    const double tau_next = tau + alpha * step.dtau;
    const double kappa_next = kappa + alpha * step.dkappa;
    if (!x_next.allFinite() || !y_next.allFinite() || !z_next.allFinite() ||
        !s_next.allFinite() || !std::isfinite(tau_next) || !std::isfinite(kappa_next)) {
      break;
    }
    x = x_next;
    y = y_next;
    z = z_next;
    s = s_next;
    tau = tau_next;
    kappa = kappa_next;
    result.iterations = iter + 1;
  }

  // Stalled or out of iterations: accept a slightly inaccurate point.
  if (tau > 0.0 && near_optimal()) {
    record(SocpStatus::near_optimal, result.iterations);
  } else if (std::isfinite(best.merit)) {
    const int iterations = result.iterations;
    result = best.summary;
    x = best.x;
    y = best.y;
    z = best.z;
    s = best.s;
    tau = best.tau;
    kappa = best.kappa;
    record(SocpStatus::near_optimal, iterations);
  } else {
    result.status = SocpStatus::failed;
  }
  return result;
}

} // namespace isac
