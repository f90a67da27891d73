#include "isac/conic.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

cvec BlockSelector::sum(const cvec &f_stacked) const { return unstack(f_stacked).rowwise().sum(); }

cvec BlockSelector::block(const cvec &f_stacked, int i) const {
  if (i < 0 || i >= n_rf) {
    throw std::out_of_range("BlockSelector::block: index out of range");
  }
  return f_stacked.segment(static_cast<Eigen::Index>(i) * n_bs, n_bs);
}

cmat BlockSelector::unstack(const cvec &f_stacked) const {
  if (f_stacked.size() != stacked_size()) {
    throw std::invalid_argument("BlockSelector: stacked vector has the wrong length");
  }
  return Eigen::Map<const cmat>(f_stacked.data(), n_bs, n_rf);
}

cvec BlockSelector::stack(const cmat &columns) const {
  if (columns.rows() != n_bs || columns.cols() != n_rf) {
    throw std::invalid_argument("BlockSelector: beamformer matrix has the wrong shape");
  }
  return Eigen::Map<const cvec>(columns.data(), stacked_size());
}

rvec embed(const cvec &z) {
  rvec x(2 * z.size());
  x << z.real(), z.imag();
  return x;
}

cvec unembed(const rvec &x) {
  const Eigen::Index n = x.size() / 2;
  cvec z(n);
  z.real() = x.head(n);
  z.imag() = x.tail(n);
  return z;
}

rmat embed(const cmat &a) {
  rmat out(2 * a.rows(), 2 * a.cols());
  out << a.real(), -a.imag(), a.imag(), a.real();
  return out;
}

std::string_view to_string(ConicStatus status) {
  switch (status) {
  case ConicStatus::optimal:
    return "optimal";
  case ConicStatus::near_optimal:
    return "near-optimal";
  case ConicStatus::infeasible:
    return "infeasible";
  case ConicStatus::failed:
    return "failed";
  }
  return "failed";
}

StackedProblem assemble(const PatternSpec &pattern, const ChannelSet &channels,
                        const Scenario &scenario, const cvec &p) {
  const Eigen::Index m = pattern.phi.rows();
  if (p.size() != m) {
    throw std::invalid_argument("assemble: phase vector length differs from the grid size");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(std::abs(p(i)) - 1.0) > 1e-9) {
      throw std::invalid_argument("assemble: phase vector entries must be unit-modulus");
    }
  }
  if (channels.h.rows() != scenario.n_c || channels.h.cols() != scenario.n_bs ||
      pattern.phi.cols() != scenario.n_bs) {
    throw std::invalid_argument("assemble: channel or pattern dimensions differ from scenario");
  }

  StackedProblem problem;
  problem.s_map = {scenario.n_bs, scenario.n_rf()};
  problem.power_budget = scenario.p_t;
  problem.sigma = std::sqrt(scenario.noise_power);

  const cmat d_phi = pattern.d_diag.asDiagonal() * pattern.phi;
  problem.sampling_embedding = embed(d_phi);
  const cmat d_phi_s = d_phi.replicate(1, problem.s_map.n_rf);
  problem.objective_matrix = embed(d_phi_s);
  const cvec target =
      (pattern.d_diag.array() * pattern.a_diag.array()).cast<cd>().matrix().cwiseProduct(p);
  problem.objective_target = embed(target);

  const Eigen::Index nn = problem.s_map.stacked_size();
  for (int n = 0; n < scenario.n_c; ++n) {
    SinrRows rows;
    rows.coefficient = std::sqrt(1.0 + 1.0 / scenario.sinr_thresholds[n]);
    rows.re_rows = rmat::Zero(problem.s_map.n_rf, 2 * nn);
    rows.im_rows = rmat::Zero(problem.s_map.n_rf, 2 * nn);
    const Eigen::RowVectorXcd h = channels.h.row(n);
    for (int i = 0; i < problem.s_map.n_rf; ++i) {
      const Eigen::Index o = static_cast<Eigen::Index>(i) * scenario.n_bs;
      // Re(h f) = Re h . Re f - Im h . Im f ; Im(h f) = Im h . Re f + Re h . Im f
      rows.re_rows.row(i).segment(o, scenario.n_bs) = h.real();
      rows.re_rows.row(i).segment(nn + o, scenario.n_bs) = -h.imag();
      rows.im_rows.row(i).segment(o, scenario.n_bs) = h.imag();
      rows.im_rows.row(i).segment(nn + o, scenario.n_bs) = h.real();
    }
    problem.sinr_rows.push_back(std::move(rows));
  }
  return problem;
}

ConeProgram to_cone_program(const StackedProblem &problem) {
  const int n_bs = problem.s_map.n_bs;
  const int n_rf = problem.s_map.n_rf;
  const Eigen::Index nn = problem.s_map.stacked_size();
  const Eigen::Index n_var = 1 + 2 * nn;

  // embed(D Phi) = Q R; the residual of the target outside range(Q) is a
  // constant coordinate of the cone.
  const rmat &e = problem.sampling_embedding;
  const Eigen::Index k = std::min(e.rows(), e.cols());
  Eigen::HouseholderQR<rmat> qr(e);
  const rmat q_thin = qr.householderQ() * rmat::Identity(e.rows(), k);
  const rmat r = q_thin.transpose() * e;
  const rvec qt_target = q_thin.transpose() * problem.objective_target;
  const double outside =
      std::sqrt(std::max(0.0, problem.objective_target.squaredNorm() - qt_target.squaredNorm()));

  // T maps embed(f) to embed(S f).
  rmat r_sum(k, 2 * nn);
  for (int i = 0; i < n_rf; ++i) {
    const Eigen::Index o = static_cast<Eigen::Index>(i) * n_bs;
    r_sum.middleCols(o, n_bs) = r.leftCols(n_bs);
    r_sum.middleCols(nn + o, n_bs) = r.rightCols(n_bs);
  }

  const Eigen::Index objective_dim = 1 + k + 1;
  const Eigen::Index power_dim = 1 + 2 * nn;
  const Eigen::Index sinr_dim = 2 + 2 * n_rf;
  const Eigen::Index n_users = static_cast<Eigen::Index>(problem.sinr_rows.size());
  const Eigen::Index rows = objective_dim + power_dim + n_users * sinr_dim;

  ConeProgram prog;
  prog.c = rvec::Unit(n_var, 0);
  prog.G = rmat::Zero(rows, n_var);
  prog.h = rvec::Zero(rows);

  Eigen::Index o = 0;
  prog.G(o, 0) = -1.0;
  prog.G.block(o + 1, 1, k, 2 * nn) = -r_sum;
  prog.h.segment(o + 1, k) = -qt_target;
  prog.h(o + 1 + k) = outside;
  prog.cone_dims.push_back(static_cast<int>(objective_dim));
  o += objective_dim;

  prog.h(o) = std::sqrt(problem.power_budget);
  prog.G.block(o + 1, 1, 2 * nn, 2 * nn) = -rmat::Identity(2 * nn, 2 * nn);
  prog.cone_dims.push_back(static_cast<int>(power_dim));
  o += power_dim;

  prog.A = rmat::Zero(n_users, n_var);
  prog.b = rvec::Zero(n_users);
  for (Eigen::Index n = 0; n < n_users; ++n) {
    const auto &sr = problem.sinr_rows[n];
    prog.G.block(o, 1, 1, 2 * nn) = -sr.coefficient * sr.re_rows.row(n);
    for (int i = 0; i < n_rf; ++i) {
      prog.G.block(o + 1 + 2 * i, 1, 1, 2 * nn) = -sr.re_rows.row(i);
      prog.G.block(o + 2 + 2 * i, 1, 1, 2 * nn) = -sr.im_rows.row(i);
    }
    prog.h(o + sinr_dim - 1) = problem.sigma;
    prog.cone_dims.push_back(static_cast<int>(sinr_dim));
    prog.A.block(n, 1, 1, 2 * nn) = sr.im_rows.row(n);
    o += sinr_dim;
  }
  return prog;
}

double objective_value(const StackedProblem &problem, const cvec &f_stacked) {
  return (problem.objective_matrix * embed(f_stacked) - problem.objective_target).norm();
}

std::vector<double> sinr_from_rows(const StackedProblem &problem, const cvec &f_stacked) {
  const rvec x = embed(f_stacked);
  std::vector<double> out;
  for (std::size_t n = 0; n < problem.sinr_rows.size(); ++n) {
    const auto &sr = problem.sinr_rows[n];
    const rvec re = sr.re_rows * x;
    const rvec im = sr.im_rows * x;
    const double signal = re(n) * re(n) + im(n) * im(n);
    const double t_sq = re.squaredNorm() + im.squaredNorm() + problem.sigma * problem.sigma;
    out.push_back(signal / (t_sq - signal));
  }
  return out;
}

ConicSolution solve(const StackedProblem &problem, double tol) {
  SocpSettings settings;
  settings.feastol = tol;
  settings.abstol = tol;
  settings.reltol = tol;
  const SocpResult res = solve_socp(to_cone_program(problem), settings);

  ConicSolution sol;
  sol.iterations = res.iterations;
  switch (res.status) {
  case SocpStatus::optimal:
    sol.status = ConicStatus::optimal;
    break;
  case SocpStatus::near_optimal:
    sol.status = ConicStatus::near_optimal;
    break;
  case SocpStatus::primal_infeasible:
    sol.status = ConicStatus::infeasible;
    return sol;
  default:
    sol.status = ConicStatus::failed;
    return sol;
  }

  sol.f_stacked = unembed(res.x.tail(res.x.size() - 1));
  const double power = sol.f_stacked.squaredNorm();
  if (power > problem.power_budget) {
    sol.f_stacked *= std::sqrt(problem.power_budget / power);
  }
  sol.objective_value = objective_value(problem, sol.f_stacked);
  return sol;
}

} // namespace isac
