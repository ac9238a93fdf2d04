#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infocascade {

/// Thrown when a player, state, observation or action index is out of range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Thrown when a game description is malformed beyond what validate_spec reports
/// (e.g. table sizes that do not match the declared spaces).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlayerSpaces {
  std::size_t states = 0;
  std::size_t observations = 0;
  std::size_t actions = 0;
};

/**
 * Tabular description of a finite-horizon game with privately observed,
 * conditionally independent Markov states.
 *
 * Joint states and joint actions are encoded in row-major (mixed radix) order
 * with player 0 as the most significant digit. Per-player tables:
 *
 *   transition[i]  : [joint action a][own state x][next own state x']
 *   observation[i] : [previous joint action a][own state x][observation w]
 *   reward[i]      : [joint state][joint action]
 *   prior[i]       : [own state]
 *
 * `static_states` marks games whose transition is the identity; the identity
 * kernel is exempt from the full-support requirement.
 */
struct GameSpec {
  std::size_t num_players = 0;
  std::size_t horizon = 0;
  std::vector<PlayerSpaces> spaces;
  std::vector<std::vector<double>> transition;
  std::vector<std::vector<double>> observation;
  std::vector<std::vector<double>> reward;
  std::vector<std::vector<double>> prior;
  bool static_states = false;

  std::size_t joint_actions() const;
  std::size_t joint_states() const;

  /// Action of `player` inside the encoded joint action.
  std::size_t action_of(std::size_t joint_action, std::size_t player) const;
  std::size_t state_of(std::size_t joint_state, std::size_t player) const;
  std::size_t encode_actions(std::span<const std::size_t> actions) const;
  std::size_t encode_states(std::span<const std::size_t> states) const;
  std::vector<std::size_t> decode_actions(std::size_t joint_action) const;
  std::vector<std::size_t> decode_states(std::size_t joint_state) const;
  /// Joint action equal to `joint_action` except that `player` plays `action`.
  std::size_t with_action(std::size_t joint_action, std::size_t player, std::size_t action) const;

  std::span<const double> transition_row(std::size_t player, std::size_t joint_action,
                                         std::size_t state) const;
  std::span<const double> observation_row(std::size_t player, std::size_t joint_action,
                                          std::size_t state) const;
  double reward_at(std::size_t player, std::size_t joint_state, std::size_t joint_action) const;

  /// Throws SpecError when table sizes disagree with the declared spaces.
  void check_shapes() const;
};

struct Violation {
  std::string table;  ///< "transition", "observation", "prior", "reward", "shape", "game"
  std::size_t player = 0;
  std::size_t row = 0;
  std::string message;
};

/// Returns every invariant violation of `spec`; empty means valid.
std::vector<Violation> validate_spec(const GameSpec& spec);

/// Reward of `player` at joint state `x` (per-player indices) and joint action `a`.
double reward_lookup(const GameSpec& spec, std::size_t player, std::span<const std::size_t> x,
                     std::span<const std::size_t> a);

}  // namespace infocascade
