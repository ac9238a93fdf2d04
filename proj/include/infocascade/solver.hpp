#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "infocascade/belief.hpp"
#include "infocascade/game_model.hpp"
#include "infocascade/prescription.hpp"

namespace infocascade {

struct SolverConfig {
  std::size_t grid_k = kDefaultGridSize;
  double tolerance = 1e-9;
  std::size_t max_iterations = 100;
  /// Upper bound on pure support profiles tried by the exhaustive fallback.
  std::size_t max_enumeration = std::size_t{1} << 16;
  /// Upper bound on belief nodes created (including abandoned candidates).
  std::size_t max_nodes = 200000;
  bool memoize = true;
};

/// Two actions whose payoffs differ by at most this are treated as tied.
inline constexpr double kTieEpsilon = 1e-12;

struct NodeRef {
  std::size_t t = 0;
  std::uint64_t key = 0;
};

class NoPureFixedPoint : public std::runtime_error {
 public:
  NoPureFixedPoint(const std::string& what, double best_residual, std::vector<NodeRef> path)
      : std::runtime_error(what), best_residual_(best_residual), path_(std::move(path)) {}
  double best_residual() const { return best_residual_; }
  /// Belief nodes from the root down to the node without a pure fixed point.
  const std::vector<NodeRef>& path() const { return path_; }

 private:
  double best_residual_;
  std::vector<NodeRef> path_;
};

class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t nodes)
      : std::runtime_error(what), nodes_(nodes) {}
  std::size_t nodes() const { return nodes_; }

 private:
  std::size_t nodes_;
};

/// Joint law of a player's (state, action) under its public belief and prescription.
struct PlayerMarginal {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<double> joint;   ///< [state * actions + action]
  std::vector<double> action;  ///< marginal over actions
};

PlayerMarginal player_marginal(const GameSpec& spec, std::size_t player, const PublicBelief& pi,
                               const Prescription& gamma);

/// V_{t+1}(F(pi, gamma, a), next_own) for the player being evaluated.
using Continuation = std::function<double(std::size_t joint_action, const PrivateBelief& next_own)>;

/**
 * Expected reward plus continuation for each own action of `player` holding private
 * belief `own`, when the others' (state, action) laws are `marginals` (entry `player`
 * is ignored). The continuation is not queried when t == horizon.
 */
std::vector<double> action_values(const GameSpec& spec, std::size_t t, std::size_t player,
                                  const PrivateBelief& own,
                                  const std::vector<PlayerMarginal>& marginals,
                                  const Continuation& continuation);

/// Expected stage payoff of playing `own_dist` at `own` while everyone else follows
/// `profile`; the belief update inside the continuation is the caller's responsibility.
double stage_payoff(const GameSpec& spec, std::size_t t, std::size_t player,
                    const JointPublicBelief& pi, const PrivateBelief& own,
                    std::span<const double> own_dist, const PrescriptionProfile& profile,
                    const Continuation& continuation);

/// Pure actions for each support atom of each player: [player][atom].
using SupportProfile = std::vector<std::vector<std::size_t>>;

struct ChildRef {
  std::size_t node = 0;
  std::function<double(std::size_t player, const PrivateBelief& xi)> value;
};

/// Produces (solving if needed) the node for `child_belief` reached by `joint_action`.
using ChildFactory =
    std::function<ChildRef(std::size_t joint_action, const JointPublicBelief& child_belief)>;

struct PlayerPrescription {
  Prescription prescription;         ///< support atoms first, then the grid
  std::vector<std::size_t> actions;  ///< pure action per cell
  std::vector<double> values;        ///< stage value per cell
  std::size_t support_count = 0;
};

struct StageSolution {
  std::vector<PlayerPrescription> players;
  std::map<std::size_t, std::size_t> children;  ///< joint action -> node
  double residual = 0.0;
};

/// Support profile whose prescriptions map support atoms only; used inside belief updates.
PrescriptionProfile support_prescriptions(const GameSpec& spec, const JointPublicBelief& pi,
                                          const SupportProfile& profile);

/**
 * Pure per-atom fixed point at one belief node: iterated best response from the
 * myopic profile, falling back to exhaustive enumeration of support profiles.
 * Grid cells receive the lowest-index best response after the fixed point is found.
 */
StageSolution solve_stage(const GameSpec& spec, std::size_t t, const JointPublicBelief& pi,
                          const ChildFactory& children, const SolverConfig& config,
                          const std::optional<SupportProfile>& seed = std::nullopt);

struct RuleNode {
  std::size_t id = 0;
  std::size_t t = 0;
  JointPublicBelief belief;  ///< canonical
  std::uint64_t key = 0;
  std::vector<PlayerPrescription> players;
  std::map<std::size_t, std::size_t> children;
  double residual = 0.0;

  std::size_t support_action(std::size_t player, std::size_t atom) const {
    return players[player].actions[atom];
  }
};

/// Equilibrium generating function materialised on the belief tree reachable from the root.
class EquilibriumRule {
 public:
  GameSpec spec;
  SolverConfig config;
  std::vector<RuleNode> nodes;
  std::size_t root = 0;

  const RuleNode& node(std::size_t id) const { return nodes.at(id); }
  PrescriptionProfile profile(std::size_t id) const;
  std::optional<std::size_t> child(std::size_t id, std::size_t joint_action) const;
  /// Node at time t whose canonical belief equals canonical(belief), if any.
  std::optional<std::size_t> find(std::size_t t, const JointPublicBelief& belief) const;
  double max_residual() const;
};

/**
 * Values and best responses at arbitrary private beliefs. A belief matching a support
 * atom of the node uses the stored action; any other belief uses the lowest-index best
 * response. Results are cached per exact belief.
 */
class RuleEvaluator {
 public:
  explicit RuleEvaluator(const EquilibriumRule& rule, bool use_stored_values = true)
      : rule_(rule), use_stored_values_(use_stored_values) {}

  const std::vector<double>& action_values(std::size_t node, std::size_t player,
                                           const PrivateBelief& xi);
  double value(std::size_t node, std::size_t player, const PrivateBelief& xi);
  std::size_t action(std::size_t node, std::size_t player, const PrivateBelief& xi);

 private:
  struct Key {
    std::size_t node;
    std::size_t player;
    std::vector<double> xi;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  const EquilibriumRule& rule_;
  bool use_stored_values_;
  std::unordered_map<Key, std::vector<double>, KeyHash> cache_;
  std::unordered_map<std::size_t, std::vector<PlayerMarginal>> marginals_;
};

/// Lowest index whose value is within kTieEpsilon of the maximum.
std::size_t lowest_argmax(std::span<const double> values);

/// Backward recursion over the belief tree reachable from `root`.
EquilibriumRule backward_solve(const GameSpec& spec, const JointPublicBelief& root,
                               const SolverConfig& config = {});

struct ForwardNode {
  std::vector<std::size_t> history;  ///< joint actions a_1..a_{t-1}
  std::size_t t = 1;
  std::size_t rule_node = 0;
  JointPublicBelief belief;          ///< recomputed along the history
  /// Some update along the history used the zero-probability branch.
  bool off_equilibrium = false;
  PrescriptionProfile strategy;
  std::map<std::size_t, std::size_t> children;  ///< joint action -> ForwardNode index
};

/// Equilibrium strategies and beliefs indexed by common history.
struct ForwardProfile {
  std::vector<ForwardNode> nodes;  ///< nodes[0] is the empty history

  /// Index of the node for `history`; throws std::out_of_range naming the missing step.
  std::size_t follow(std::span<const std::size_t> history) const;
};

/// Number of common histories (paths from the root, including the empty one).
double count_histories(const EquilibriumRule& rule);

/// Walks every common history of the solved tree with at most `max_depth` joint actions,
/// recomputing beliefs with the stored prescriptions and checking them against the tree
/// (tolerance 1e-9). The profile grows with the number of histories, which is exponential
/// in the horizon. Cascade checks over histories need the unlimited profile, since a
/// truncated one has no children below `max_depth`.
ForwardProfile forward_construct(const EquilibriumRule& rule,
                                 std::size_t max_depth = static_cast<std::size_t>(-1));

}  // namespace infocascade
