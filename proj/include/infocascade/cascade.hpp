#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "infocascade/solver.hpp"

namespace infocascade {

/// Action probabilities at or above 1 - kCertainTolerance count as "played surely".
inline constexpr double kCertainTolerance = 1e-9;

struct CascadeWitness {
  bool holds = false;
  /// Rule nodes visited, starting with the queried node.
  std::vector<std::size_t> chain;
  // First violation (meaningful when !holds).
  std::size_t t = 0;
  std::size_t node = 0;
  std::size_t player = 0;
  std::vector<double> atom;
  double probability = 0.0;
};

/**
 * Whether the node's public belief lies in the belief-based cascade set for the joint
 * action sequence `actions` (one joint action per period t..T): every support atom of
 * every player plays its action surely, and the child reached by that action is again
 * in the set. At t = T + 1 the (empty) sequence always holds and `node` is ignored.
 */
CascadeWitness is_cascading_belief(const EquilibriumRule& rule, std::size_t t, std::size_t node,
                                   std::span<const std::size_t> actions);

struct HistoryCascade {
  bool positive_probability = false;
  bool holds = false;
};

/**
 * Whether, after the common history `history`, every positive-probability private
 * history of every player plays the sequence `actions` surely at every later period.
 * Private histories are enumerated from the root atoms and observation sequences.
 */
HistoryCascade is_cascading_history(const ForwardProfile& profile, const EquilibriumRule& rule,
                                    std::span<const std::size_t> history,
                                    std::span<const std::size_t> actions);

struct EquivalenceCounterexample {
  std::vector<std::size_t> history;
  std::size_t joint_action = 0;
  bool history_cascade = false;
  bool belief_cascade = false;
};

struct EquivalenceReport {
  std::size_t checked = 0;
  std::size_t skipped_zero_probability = 0;
  std::size_t cascading = 0;
  std::vector<EquivalenceCounterexample> counterexamples;
};

/// Every common history of the profile with at most `max_depth` joint actions.
std::vector<std::vector<std::size_t>> enumerate_histories(const ForwardProfile& profile,
                                                          std::size_t max_depth);

/// Compares the history and belief definitions for the constant sequence `joint_action`
/// over the given histories. Zero-probability histories are skipped and counted.
EquivalenceReport check_equivalence(const ForwardProfile& profile, const EquilibriumRule& rule,
                                    const std::vector<std::vector<std::size_t>>& histories,
                                    std::size_t joint_action);

}  // namespace infocascade
