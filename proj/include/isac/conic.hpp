#pragma once

#include <string_view>
#include <vector>

#include "isac/model.hpp"
#include "isac/pattern.hpp"
#include "isac/socp.hpp"

namespace isac {

/// Index map over the stacked beamformer f = [f_1; ...; f_{N_RF}].
struct BlockSelector {
  int n_bs = 0;
  int n_rf = 0;

  Eigen::Index stacked_size() const { return static_cast<Eigen::Index>(n_bs) * n_rf; }
  /// sum_i f_i.
  cvec sum(const cvec &f_stacked) const;
  /// f_i, 0-based.
  cvec block(const cvec &f_stacked, int i) const;
  /// N_BS x N_RF matrix whose columns are the blocks.
  cmat unstack(const cvec &f_stacked) const;
  cvec stack(const cmat &columns) const;
};

/// z -> [Re z; Im z].
rvec embed(const cvec &z);
cvec unembed(const rvec &x);
/// A -> [[Re A, -Im A], [Im A, Re A]].
rmat embed(const cmat &a);

/// Rows of one user's SINR cone in the real embedding. Row i of re_rows
/// (im_rows) evaluates Re (Im) of h_n f_i on embed(f).
struct SinrRows {
  rmat re_rows;
  rmat im_rows;
  /// sqrt(1 + 1/Gamma_n).
  double coefficient = 1.0;
};

/// Fixed-phase transmit-beam problem over the embedded stacked beamformer:
///
///   minimize    || D (Phi S f - A p) ||
///   subject to  ||f|| <= sqrt(P_T)
///               || t_n || <= c_n Re(h_n f_n),  Im(h_n f_n) = 0
///
/// with t_n = (h_n f_1, ..., h_n f_{N_RF}, sigma).
struct StackedProblem {
  BlockSelector s_map;
  /// embed(D Phi), 2M x 2 N_BS.
  rmat sampling_embedding;
  /// embed(D Phi S), 2M x 2 N_RF N_BS.
  rmat objective_matrix;
  /// embed(D A p).
  rvec objective_target;
  double power_budget = 0.0;
  double sigma = 1.0;
  std::vector<SinrRows> sinr_rows;
};

enum class ConicStatus { optimal, near_optimal, infeasible, failed };
std::string_view to_string(ConicStatus status);

struct ConicSolution {
  /// Empty unless status is optimal or near-optimal.
  cvec f_stacked;
  double objective_value = 0.0;
  ConicStatus status = ConicStatus::failed;
  int iterations = 0;
};

StackedProblem assemble(const PatternSpec &pattern, const ChannelSet &channels,
                        const Scenario &scenario, const cvec &p);

/// Standard-form program over x = (u, embed(f)). The objective cone is
/// compressed through a thin QR of embed(D Phi); the norm it bounds is
/// unchanged.
ConeProgram to_cone_program(const StackedProblem &problem);

/// || objective_matrix * embed(f) - objective_target ||.
double objective_value(const StackedProblem &problem, const cvec &f_stacked);

/// Per-user SINR recovered from the assembled cone rows.
std::vector<double> sinr_from_rows(const StackedProblem &problem, const cvec &f_stacked);

/// Solves the program to tolerance tol. A solution that overshoots the power
/// budget by solver round-off is scaled back onto it.
ConicSolution solve(const StackedProblem &problem, double tol = 1e-8);

} // namespace isac
