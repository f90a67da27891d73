#pragma once

#include <vector>

#include "isac/model.hpp"

namespace isac {

/// Angle-sampling matrix and objective beam pattern.
struct PatternSpec {
  /// M x N_BS; row m is the conjugate-transposed array response toward
  /// grid(m) (see sampling_matrix), so row m applied to f is the field
  /// radiated toward grid(m).
  cmat phi;
  /// Objective pattern b, length M.
  rvec b;
  /// Diagonal of D.
  rvec d_diag;
  /// Diagonal of A = diag(b).
  rvec a_diag;
  /// Sine-space sample points, strictly increasing in (-1, 1].
  rvec grid;
};

/// m equally spaced sine-space points spanning (-1, 1].
rvec build_grid(int m);

/// In-band gain sqrt(2 N_RF P_T / sum(sin(upper) - sin(lower))).
double objective_gain(const std::vector<AngleBand> &bands, int n_rf, double p_t);

/// True when sine-space point x lies in the closed band.
bool in_band(const AngleBand &band, double x);
bool in_any_band(const std::vector<AngleBand> &bands, double x);

/// Objective pattern b over the grid.
rvec build_objective(const Scenario &scenario, const rvec &grid);

/// Sampling matrix for n_bs antennas over the grid; row m is
/// sqrt(n_bs) * steering_vector(n_bs, grid(m)) conjugate-transposed, the
/// unnormalized array response. On this scale sum_m |b_m|^2 matches the
/// pattern energy of a full-power beam.
cmat sampling_matrix(int n_bs, const rvec &grid);

PatternSpec build_pattern_spec(const Scenario &scenario);

/// |phi * f_sum| elementwise.
rvec beam_pattern(const cmat &phi, const cvec &f_sum);

/// || |phi * sum_i f_i| - b ||^2 / (n_rf * p_t). Beamformers are the columns of
/// f_list.
double pattern_mse(const cmat &phi, const cmat &f_list, const rvec &b, int n_rf, double p_t);

} // namespace isac
