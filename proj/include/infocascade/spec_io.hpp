#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "infocascade/belief.hpp"
#include "infocascade/game_model.hpp"
#include "infocascade/investment.hpp"

namespace infocascade {

/// Parse failure with the 1-based line and the offending field ("section.key").
class SpecParseError : public SpecError {
 public:
  SpecParseError(const std::string& message, std::size_t line, std::string field)
      : SpecError(format(message, line, field)), line_(line), field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& message, std::size_t line, const std::string& field);
  std::size_t line_;
  std::string field_;
};

/**
 * Contents of a spec file. Either the tables are given explicitly or an [investment]
 * section is expanded with build_spec. Optional [root.i] sections replace the default
 * root (a point mass on each player's prior).
 */
struct SpecDocument {
  GameSpec game;
  std::optional<InvestmentParams> investment;
  std::optional<JointPublicBelief> root;

  JointPublicBelief root_belief() const;
  /// Replaces the horizon (and re-expands the investment shorthand).
  void set_horizon(std::size_t horizon);
};

/**
 * Reads the flat sectioned format:
 *
 *   # comment
 *   [game]          players, horizon, static_states (true/false)
 *   [player.i]      states, observations, actions, prior = [...]
 *   [transition.i]  data = [...]   # [joint action][state][next state]
 *   [observation.i] data = [...]   # [previous joint action][state][observation]
 *   [reward.i]      data = [...]   # [joint state][joint action]
 *   [investment]    players, horizon, lambda, p0, p1, prior
 *   [root.i]        beliefs = [...] (atoms concatenated), weights = [...]
 *
 * Arrays may span several lines. Shapes are checked; stochasticity is left to
 * validate_spec.
 */
SpecDocument parse_spec(const std::string& text);
SpecDocument load_spec_file(const std::string& path);

/// Writes a document that parses back to bit-identical tables.
std::string write_spec(const SpecDocument& doc);

}  // namespace infocascade
