#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "isac/conic.hpp"
#include "isac/model.hpp"
#include "isac/pattern.hpp"

namespace isac {

/// Stop condition for an alternating loop. The loop ends at max_iters, or
/// earlier when the objective drops to objective_threshold or its relative
/// change falls below relative_change_threshold.
struct StopRule {
  int max_iters = 20;
  std::optional<double> objective_threshold;
  std::optional<double> relative_change_threshold = 1e-4;

  /// Throws std::invalid_argument when no criterion is usable.
  void validate() const;

  bool operator==(const StopRule &) const = default;
};

enum class DesignStatus { converged, max_iters, infeasible, failed };
std::string_view to_string(DesignStatus status);

struct BeamDesign {
  /// N_BS x N_RF, columns f_1 ... f_{N_RF}. Empty when infeasible.
  cmat f_list;
  cvec f_stacked;
  cvec p;
  /// Objective || D (Phi sum f_i - A p) || after each full iteration.
  std::vector<double> trace;
  DesignStatus status = DesignStatus::failed;
  /// Set when a later conic solve failed and the previous iterate was kept.
  bool solver_failure = false;
  int conic_solves = 0;
  int phase_updates = 0;
};

/// Alternates the fixed-phase conic solve and the phase projection, starting
/// from uniformly random phases drawn from rng.
BeamDesign design_transmit_beam(const Scenario &scenario, const ChannelSet &channels,
                                const PatternSpec &pattern, const StopRule &stop, Rng &rng,
                                double solver_tol = 1e-8);

} // namespace isac
