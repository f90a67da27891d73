#pragma once

#include "isac/model.hpp"
#include "isac/pattern.hpp"

namespace isac {

/// Magnitudes at or below this keep the previous phase.
constexpr double kPhaseZeroTol = 1e-14;

/// Least-squares map from the transmit beam to the unconstrained phase
/// estimate. Rows where b_m or d_m vanish are zero (those phases are inert).
cmat precompute_w(const PatternSpec &pattern);

/// Projects W * sum_i f_i onto the unit circle entrywise. Entries whose
/// estimate is (numerically) zero keep previous_p. Beamformers are the columns
/// of f_list.
cvec update_phase(const cmat &w, const cmat &f_list, const cvec &previous_p);

/// || D (Phi sum_i f_i - A p) ||.
double phase_objective(const PatternSpec &pattern, const cvec &f_sum, const cvec &p);

} // namespace isac
