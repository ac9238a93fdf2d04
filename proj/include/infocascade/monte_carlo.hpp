#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infocascade/investment.hpp"
#include "infocascade/solver.hpp"

namespace infocascade {

/// Public-belief tree followed by simulated players: beliefs, prescriptions, children.
class StrategyTree {
 public:
  virtual ~StrategyTree() = default;
  virtual const GameSpec& spec() const = 0;
  virtual std::size_t root() = 0;
  virtual std::size_t time(std::size_t node) = 0;
  virtual const JointPublicBelief& belief(std::size_t node) = 0;
  virtual std::span<const double> action_dist(std::size_t node, std::size_t player,
                                              const PrivateBelief& xi) = 0;
  virtual std::size_t child(std::size_t node, std::size_t joint_action) = 0;
};

/// Follows a solved rule; leaving the solved tree is an error.
class RuleStrategy : public StrategyTree {
 public:
  explicit RuleStrategy(const EquilibriumRule& rule) : rule_(rule) {}
  const GameSpec& spec() const override { return rule_.spec; }
  std::size_t root() override { return rule_.root; }
  std::size_t time(std::size_t node) override { return rule_.node(node).t; }
  const JointPublicBelief& belief(std::size_t node) override { return rule_.node(node).belief; }
  std::span<const double> action_dist(std::size_t node, std::size_t player,
                                      const PrivateBelief& xi) override;
  std::size_t child(std::size_t node, std::size_t joint_action) override;

 private:
  const EquilibriumRule& rule_;
};

/// Prescription of one player at a public belief and time.
using PolicyBuilder =
    std::function<Prescription(const JointPublicBelief& pi, std::size_t t, std::size_t player)>;

/// Fixed (non-equilibrium) policy; public beliefs are built lazily with joint_public_update.
class PolicyStrategy : public StrategyTree {
 public:
  PolicyStrategy(GameSpec spec, JointPublicBelief root, PolicyBuilder builder);
  const GameSpec& spec() const override { return spec_; }
  std::size_t root() override { return 0; }
  std::size_t time(std::size_t node) override { return nodes_.at(node).t; }
  const JointPublicBelief& belief(std::size_t node) override { return nodes_.at(node).belief; }
  std::span<const double> action_dist(std::size_t node, std::size_t player,
                                      const PrivateBelief& xi) override;
  std::size_t child(std::size_t node, std::size_t joint_action) override;
  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    std::size_t t;
    JointPublicBelief belief;
    PrescriptionProfile profile;
    std::map<std::size_t, std::size_t> children;
  };
  std::size_t add(std::size_t t, JointPublicBelief belief);

  GameSpec spec_;
  PolicyBuilder builder_;
  std::vector<Node> nodes_;
};

/// Every player plays `action` regardless of its belief.
PolicyBuilder constant_policy(const GameSpec& spec, std::size_t action);
/// Investment game: invest iff the one-period gain is strictly positive.
PolicyBuilder myopic_investment_policy(const InvestmentParams& params, std::size_t grid_k = kDefaultGridSize);

struct MonteCarloConfig {
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  /// Same true state index for every player instead of sampling it.
  std::optional<std::size_t> force_state;
  /// Enables analytic cascade tracking (investment games only).
  std::optional<InvestmentParams> investment;
};

struct TrajectoryRecord {
  std::vector<std::size_t> states;                ///< true state per player
  std::vector<std::vector<PrivateBelief>> beliefs;  ///< [t-1][player]
  std::vector<std::size_t> actions;               ///< joint action per period
  std::vector<std::vector<double>> public_means;  ///< [t-1][player], mean of the last state
  std::vector<bool> in_cascade;                   ///< analytic set for some joint action
  std::vector<std::optional<std::size_t>> entry_time;  ///< per joint action
  std::string cascade_label;                      ///< none, good, bad or neutral
};

struct MonteCarloSummary {
  std::size_t trajectories = 0;
  std::size_t horizon = 0;
  /// Share of (trajectory, player) pairs with final belief above 0.99 on the true state.
  double fraction_confident = 0.0;
  /// Mean of 1 - final belief on the true state.
  double mean_terminal_error = 0.0;
  /// Share of trajectories that play one joint action in every period.
  double fraction_constant_play = 0.0;
  /// [joint action][t - 1] counts of first entry into the analytic cascade set;
  /// the last column counts trajectories that never enter.
  std::vector<std::vector<std::size_t>> entry_counts;
  std::map<std::string, std::size_t> cascade_labels;
};

struct MonteCarloResult {
  std::vector<TrajectoryRecord> trajectories;
  MonteCarloSummary summary;
};

/// Seed of trajectory i, derived from the run seed.
std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t i);

/**
 * Samples trajectories: root atoms and true states, then per period actions from the
 * prescriptions, next states, observations and private updates. Trajectory i draws
 * from its own generator seeded with trajectory_seed(seed, i).
 */
MonteCarloResult monte_carlo(StrategyTree& tree, const MonteCarloConfig& config);

}  // namespace infocascade
