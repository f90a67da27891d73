#include "isac/altmin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isac/phase.hpp"

namespace isac {

void StopRule::validate() const {
  if (max_iters < 1) {
    throw std::invalid_argument("stop.max_iters: must be at least 1");
  }
  if (objective_threshold && !(*objective_threshold >= 0.0)) {
    throw std::invalid_argument("stop.objective_threshold: must be non-negative");
  }
  if (relative_change_threshold && !(*relative_change_threshold >= 0.0)) {
    throw std::invalid_argument("stop.relative_change_threshold: must be non-negative");
  }
}

std::string_view to_string(DesignStatus status) {
  switch (status) {
  case DesignStatus::converged:
    return "converged";
  case DesignStatus::max_iters:
    return "max-iters";
  case DesignStatus::infeasible:
    return "infeasible";
  case DesignStatus::failed:
    return "failed";
  }
  return "failed";
}

BeamDesign design_transmit_beam(const Scenario &scenario, const ChannelSet &channels,
                                const PatternSpec &pattern, const StopRule &stop, Rng &rng,
                                double solver_tol) {
  stop.validate();
  BeamDesign design;
  design.p = random_unit_modulus(pattern.phi.rows(), rng);
  const cmat w = precompute_w(pattern);
  const BlockSelector s_map{scenario.n_bs, scenario.n_rf()};

  for (int iter = 0; iter < stop.max_iters; ++iter) {
    const StackedProblem problem = assemble(pattern, channels, scenario, design.p);
    const ConicSolution sol = solve(problem, solver_tol);
    ++design.conic_solves;

    if (sol.status == ConicStatus::infeasible || sol.status == ConicStatus::failed) {
      if (iter == 0) {
        design.status = sol.status == ConicStatus::infeasible ? DesignStatus::infeasible
                                                              : DesignStatus::failed;
        return design;
      }
      design.solver_failure = true;
      design.status = DesignStatus::max_iters;
      return design;
    }

    // The previous beam is feasible for this problem too; keep whichever
    // matches the current phases better.
    if (design.f_stacked.size() == 0 ||
        sol.objective_value <= objective_value(problem, design.f_stacked)) {
      design.f_stacked = sol.f_stacked;
    }
    design.f_list = s_map.unstack(design.f_stacked);

    design.p = update_phase(w, design.f_list, design.p);
    ++design.phase_updates;

    const double value = phase_objective(pattern, s_map.sum(design.f_stacked), design.p);
    const double previous =
        design.trace.empty() ? std::numeric_limits<double>::quiet_NaN() : design.trace.back();
    design.trace.push_back(value);

    if (stop.objective_threshold && value <= *stop.objective_threshold) {
      design.status = DesignStatus::converged;
      return design;
    }
    if (stop.relative_change_threshold && !std::isnan(previous)) {
      const double change = std::abs(previous - value);
      if (change <= *stop.relative_change_threshold * std::abs(previous)) {
        design.status = DesignStatus::converged;
        return design;
      }
    }
  }
  design.status = DesignStatus::max_iters;
  return design;
}

} // namespace isac
