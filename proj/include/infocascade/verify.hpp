#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "infocascade/solver.hpp"

namespace infocascade {

inline constexpr double kEquilibriumCertificate = 1e-8;

struct DeviationSite {
  std::string kind;  ///< "single-stage" or "multi-stage"
  std::size_t t = 0;
  std::size_t node = 0;
  std::size_t player = 0;
  std::vector<double> belief;        ///< deviating player's private belief
  std::vector<std::size_t> history;  ///< joint actions leading to the node (multi-stage only)
  double gain = 0.0;
};

struct DeviationReport {
  double max_gain = 0.0;
  double single_stage_gain = 0.0;
  /// Present when the horizon is small enough for exhaustive multi-stage deviations.
  std::optional<double> multi_stage_gain;
  DeviationSite worst;
  std::size_t cells_checked = 0;
  std::size_t information_sets_checked = 0;
  /// Expected total payoff at the root per player: from the rule's value functions and
  /// from direct enumeration of the game tree under the rule (multi-stage runs only).
  std::vector<double> root_value_rule;
  std::vector<double> root_value_enumerated;

  bool certified(double tol = kEquilibriumCertificate) const { return max_gain <= tol; }
};

/**
 * Largest payoff gain from deviating from the rule. Checks every pure one-shot deviation
 * at every cell of every node (continuation values recomputed from the stored actions),
 * and, when horizon <= multi_stage_horizon, every pure multi-stage deviation by
 * enumerating each player's information sets (private observation histories) directly.
 */
DeviationReport verify_equilibrium(const EquilibriumRule& rule, std::size_t multi_stage_horizon = 3);

}  // namespace infocascade
