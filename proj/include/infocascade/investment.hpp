#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "infocascade/belief.hpp"
#include "infocascade/game_model.hpp"

namespace infocascade {

/**
 * Team investment game: binary static types (index 0 is -1, index 1 is +1), private
 * observations of the own type through a binary symmetric channel whose crossover
 * is p1 after investing and p0 otherwise, and reward
 *   a^i * (lambda * x^i + (1 - lambda) * mean_{j != i} x^j).
 * Action 1 is "invest". Observation index 1 is the +1-indicative symbol.
 */
struct InvestmentParams {
  std::size_t players = 2;
  std::size_t horizon = 5;
  double lambda = 0.5;
  double p0 = 0.25;
  double p1 = 0.25;
  /// P(x^i = +1); also the root private belief of every player.
  double prior = 0.5;
};

class ParameterError : public SpecError {
 public:
  using SpecError::SpecError;
};

/// Throws ParameterError unless players, horizon >= 1, 0 <= p1 <= p0 < 1/2,
/// lambda and prior in [0,1].
void validate_params(const InvestmentParams& params);

GameSpec build_spec(const InvestmentParams& params);

/// Average public mean of the given players' types being +1; 0.5 when empty.
double hat_xi(std::span<const PublicBelief> others);
/// hat_xi over every player except `player`.
double hat_xi_excluding(const JointPublicBelief& pi, std::size_t player);

/// Expected one-period reward from investing: lambda(2 xi - 1) + (1 - lambda)(2 hat - 1).
double invest_gain(double lambda, double xi, double hat);

/// Membership of pi in the analytic constant-cascade set for the joint action given
/// as one action per player (weak inequalities).
bool in_analytic_cascade(const JointPublicBelief& pi, std::span<const std::size_t> actions,
                         const InvestmentParams& params);

/// In-cascade value (T - t + 1) * invest_gain * a^i.
double cascade_value(const InvestmentParams& params, std::size_t t, double xi, double hat,
                     std::size_t action);

/// E[xi' | xi, x = +1] - xi for crossover p; zero at xi in {0, 1}.
double drift(double xi, double p);

/// Closed-form scalar posterior of x = +1 after one observation.
double scalar_update(double xi, bool plus_symbol, double p);

}  // namespace infocascade
