#include "infocascade/game_model.hpp"

#include <cmath>
#include <sstream>

namespace infocascade {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::size_t product(const std::vector<PlayerSpaces>& spaces, std::size_t PlayerSpaces::*field) {
  std::size_t n = 1;
  for (const auto& s : spaces) n *= s.*field;
  return n;
}

std::size_t stride(const std::vector<PlayerSpaces>& spaces, std::size_t PlayerSpaces::*field,
                   std::size_t player) {
  std::size_t s = 1;
  for (std::size_t j = player + 1; j < spaces.size(); ++j) s *= spaces[j].*field;
  return s;
}

std::string describe_row(const char* table, std::size_t player, std::size_t row, double sum) {
  std::ostringstream os;
  os.precision(17);
  os << table << " row " << row << " of player " << player << " sums to " << sum;
  return os.str();
}

}  // namespace

std::size_t GameSpec::joint_actions() const { return product(spaces, &PlayerSpaces::actions); }

std::size_t GameSpec::joint_states() const { return product(spaces, &PlayerSpaces::states); }

std::size_t GameSpec::action_of(std::size_t joint_action, std::size_t player) const {
  if (player >= num_players) throw IndexError("player index out of range");
  return (joint_action / stride(spaces, &PlayerSpaces::actions, player)) % spaces[player].actions;
}

std::size_t GameSpec::state_of(std::size_t joint_state, std::size_t player) const {
  if (player >= num_players) throw IndexError("player index out of range");
  return (joint_state / stride(spaces, &PlayerSpaces::states, player)) % spaces[player].states;
}

std::size_t GameSpec::encode_actions(std::span<const std::size_t> actions) const {
  if (actions.size() != num_players) throw IndexError("joint action has wrong arity");
  std::size_t code = 0;
  for (std::size_t i = 0; i < num_players; ++i) {
    if (actions[i] >= spaces[i].actions) throw IndexError("action index out of range");
    code = code * spaces[i].actions + actions[i];
  }
  return code;
}

std::size_t GameSpec::encode_states(std::span<const std::size_t> states) const {
  if (states.size() != num_players) throw IndexError("joint state has wrong arity");
  std::size_t code = 0;
  for (std::size_t i = 0; i < num_players; ++i) {
    if (states[i] >= spaces[i].states) throw IndexError("state index out of range");
    code = code * spaces[i].states + states[i];
  }
  return code;
}

std::vector<std::size_t> GameSpec::decode_actions(std::size_t joint_action) const {
  std::vector<std::size_t> out(num_players);
  for (std::size_t i = num_players; i-- > 0;) {
    out[i] = joint_action % spaces[i].actions;
    joint_action /= spaces[i].actions;
  }
  return out;
}

std::vector<std::size_t> GameSpec::decode_states(std::size_t joint_state) const {
  std::vector<std::size_t> out(num_players);
  for (std::size_t i = num_players; i-- > 0;) {
    out[i] = joint_state % spaces[i].states;
    joint_state /= spaces[i].states;
  }
  return out;
}

std::size_t GameSpec::with_action(std::size_t joint_action, std::size_t player,
                                  std::size_t action) const {
  const std::size_t s = stride(spaces, &PlayerSpaces::actions, player);
  const std::size_t current = action_of(joint_action, player);
  return joint_action - current * s + action * s;
}

std::span<const double> GameSpec::transition_row(std::size_t player, std::size_t joint_action,
                                                 std::size_t state) const {
  const std::size_t n = spaces.at(player).states;
  const std::size_t offset = (joint_action * n + state) * n;
  if (joint_action >= joint_actions() || state >= n) throw IndexError("transition row out of range");
  return {transition[player].data() + offset, n};
}

std::span<const double> GameSpec::observation_row(std::size_t player, std::size_t joint_action,
                                                  std::size_t state) const {
  const std::size_t n = spaces.at(player).states;
  const std::size_t m = spaces[player].observations;
  if (joint_action >= joint_actions() || state >= n) throw IndexError("observation row out of range");
  return {observation[player].data() + (joint_action * n + state) * m, m};
}

double GameSpec::reward_at(std::size_t player, std::size_t joint_state,
                           std::size_t joint_action) const {
  if (player >= num_players) throw IndexError("player index out of range");
  if (joint_state >= joint_states() || joint_action >= joint_actions())
    throw IndexError("reward index out of range");
  return reward[player][joint_state * joint_actions() + joint_action];
}

void GameSpec::check_shapes() const {
  auto fail = [](const std::string& what) { throw SpecError(what); };
  if (num_players == 0) fail("game must have at least one player");
  if (horizon == 0) fail("horizon must be positive");
  if (spaces.size() != num_players) fail("spaces: expected one entry per player");
  for (const auto& s : spaces)
    if (s.states == 0 || s.observations == 0 || s.actions == 0) fail("spaces must be non-empty");
  if (transition.size() != num_players || observation.size() != num_players ||
      reward.size() != num_players || prior.size() != num_players)
    fail("tables: expected one table per player");
  const std::size_t na = joint_actions();
  const std::size_t nx = joint_states();
  for (std::size_t i = 0; i < num_players; ++i) {
    const auto& s = spaces[i];
    auto expect = [&](const std::vector<double>& t, std::size_t size, const char* name) {
      if (t.size() != size) {
        std::ostringstream os;
        os << name << " table of player " << i << " has " << t.size() << " entries, expected "
           << size;
        fail(os.str());
      }
    };
    expect(transition[i], na * s.states * s.states, "transition");
    expect(observation[i], na * s.states * s.observations, "observation");
    expect(reward[i], nx * na, "reward");
    expect(prior[i], s.states, "prior");
  }
}

std::vector<Violation> validate_spec(const GameSpec& spec) {
  std::vector<Violation> out;
  try {
    spec.check_shapes();
  } catch (const SpecError& e) {
    out.push_back({"shape", 0, 0, e.what()});
    return out;
  }

  auto check_rows = [&](const std::vector<double>& table, std::size_t width, const char* name,
                        std::size_t player, bool allow_zero) {
    const std::size_t rows = table.size() / width;
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      bool bad_entry = false;
      for (std::size_t c = 0; c < width; ++c) {
        const double v = table[r * width + c];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0 || (!allow_zero && v <= 0.0)) bad_entry = true;
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        out.push_back({name, player, r, describe_row(name, player, r, sum)});
      if (bad_entry) {
        std::ostringstream os;
        os << name << " row " << r << " of player " << player
           << (allow_zero ? " has an entry outside [0,1]" : " lacks full support");
        out.push_back({name, player, r, os.str()});
      }
    }
  };

  for (std::size_t i = 0; i < spec.num_players; ++i) {
    const auto& s = spec.spaces[i];
    if (spec.static_states) {
      // Only the identity kernel is accepted in place of full support.
      const std::size_t rows = spec.transition[i].size() / s.states;
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t x = r % s.states;
        for (std::size_t c = 0; c < s.states; ++c) {
          const double expected = (c == x) ? 1.0 : 0.0;
          if (spec.transition[i][r * s.states + c] != expected) {
            std::ostringstream os;
            os << "transition row " << r << " of player " << i
               << " is not the identity although static_states is set";
            out.push_back({"transition", i, r, os.str()});
            break;
          }
        }
      }
    } else {
      check_rows(spec.transition[i], s.states, "transition", i, false);
    }
    check_rows(spec.observation[i], s.observations, "observation", i, false);
    check_rows(spec.prior[i], s.states, "prior", i, true);
    for (std::size_t k = 0; k < spec.reward[i].size(); ++k) {
      if (!std::isfinite(spec.reward[i][k])) {
        std::ostringstream os;
        os << "reward entry " << k << " of player " << i << " is not finite";
        out.push_back({"reward", i, k, os.str()});
      }
    }
  }
  return out;
}

double reward_lookup(const GameSpec& spec, std::size_t player, std::span<const std::size_t> x,
                     std::span<const std::size_t> a) {
  if (player >= spec.num_players) throw IndexError("player index out of range");
  return spec.reward_at(player, spec.encode_states(x), spec.encode_actions(a));
}

}  // namespace infocascade
