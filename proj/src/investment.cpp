#include "infocascade/investment.hpp"

#include <sstream>

namespace infocascade {

namespace {

double sign_of(std::size_t state) { return state == 1 ? 1.0 : -1.0; }

}  // namespace

void validate_params(const InvestmentParams& params) {
  auto fail = [](const std::string& what) { throw ParameterError(what); };
  if (params.players == 0) fail("investment game needs at least one player");
  if (params.horizon == 0) fail("investment game needs a positive horizon");
  if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (!(params.p1 >= 0.0)) fail("p1 must be non-negative");
  if (!(params.p1 <= params.p0)) fail("p1 must not exceed p0");
  if (!(params.p0 < 0.5)) fail("p0 must be below 1/2");
  if (!(params.prior >= 0.0 && params.prior <= 1.0)) fail("prior must lie in [0, 1]");
}

GameSpec build_spec(const InvestmentParams& params) {
  validate_params(params);
  const std::size_t n = params.players;
  GameSpec spec;
  spec.num_players = n;
  spec.horizon = params.horizon;
  spec.static_states = true;
  spec.spaces.assign(n, PlayerSpaces{2, 2, 2});
  const std::size_t na = spec.joint_actions();
  const std::size_t nx = spec.joint_states();
  const double social = 1.0 - params.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> trans(na * 4), obs(na * 4), rew(nx * na);
    for (std::size_t a = 0; a < na; ++a) {
      const double p = spec.action_of(a, i) == 1 ? params.p1 : params.p0;
      for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) trans[(a * 2 + x) * 2 + y] = x == y ? 1.0 : 0.0;
        obs[(a * 2 + x) * 2 + x] = 1.0 - p;
        obs[(a * 2 + x) * 2 + (1 - x)] = p;
      }
    }
    for (std::size_t xs = 0; xs < nx; ++xs) {
      const auto states = spec.decode_states(xs);
      double others = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others += sign_of(states[j]);
      const double avg = n > 1 ? others / static_cast<double>(n - 1) : 0.0;
      const double invest = params.lambda * sign_of(states[i]) + social * avg;
      for (std::size_t a = 0; a < na; ++a)
        rew[xs * na + a] = spec.action_of(a, i) == 1 ? invest : 0.0;
    }
    spec.transition.push_back(std::move(trans));
    spec.observation.push_back(std::move(obs));
    spec.reward.push_back(std::move(rew));
    spec.prior.push_back({1.0 - params.prior, params.prior});
  }
  return spec;
}

double hat_xi(std::span<const PublicBelief> others) {
  if (others.empty()) return 0.5;
  double sum = 0.0;
  for (const auto& pi : others) sum += mean_belief(pi).at(1);
  return sum / static_cast<double>(others.size());
}

double hat_xi_excluding(const JointPublicBelief& pi, std::size_t player) {
  std::vector<PublicBelief> others;
  for (std::size_t j = 0; j < pi.num_players(); ++j)
    if (j != player) others.push_back(pi[j]);
  return hat_xi(others);
}

double invest_gain(double lambda, double xi, double hat) {
  return lambda * (2.0 * xi - 1.0) + (1.0 - lambda) * (2.0 * hat - 1.0);
}

bool in_analytic_cascade(const JointPublicBelief& pi, std::span<const std::size_t> actions,
                         const InvestmentParams& params) {
  if (actions.size() != pi.num_players()) throw IndexError("one action per player expected");
  const double lambda = params.lambda;
  for (std::size_t i = 0; i < pi.num_players(); ++i) {
    const double social = (1.0 - lambda) * (2.0 * hat_xi_excluding(pi, i) - 1.0);
    if (actions[i] == 0) {
      if (!(lambda + social <= 0.0)) return false;
    } else {
      if (!(-lambda + social >= 0.0)) return false;
    }
  }
  return true;
}

double cascade_value(const InvestmentParams& params, std::size_t t, double xi, double hat,
                     std::size_t action) {
  if (t == 0 || t > params.horizon) throw IndexError("time outside 1..horizon");
  const double periods = static_cast<double>(params.horizon - t + 1);
  return periods * invest_gain(params.lambda, xi, hat) * static_cast<double>(action);
}

double drift(double xi, double p) {
  if (xi <= 0.0 || xi >= 1.0) return 0.0;
  const double q = 1.0 - 2.0 * p;
  const double num = xi * (1.0 - xi) * (1.0 - xi) * q * q;
  const double den = (xi * p + (1.0 - xi) * (1.0 - p)) * (xi * (1.0 - p) + (1.0 - xi) * p);
  return num / den;
}

double scalar_update(double xi, bool plus_symbol, double p) {
  const double like_high = plus_symbol ? 1.0 - p : p;
  const double like_low = plus_symbol ? p : 1.0 - p;
  return xi * like_high / (xi * like_high + (1.0 - xi) * like_low);
}

}  // namespace infocascade
