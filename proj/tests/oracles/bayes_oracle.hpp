#pragma once

// Brute-force Bayes by enumerating every joint state/observation path. Uses only the raw
// game tables, never the library's belief updates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "infocascade/game_model.hpp"

namespace infocascade::testing {

/// Action distribution of `player` at time t after common history, given its private belief.
using StrategyFn = std::function<std::vector<double>(std::size_t t, const std::vector<std::size_t>& history,
                                                     std::size_t player, const std::vector<double>& xi)>;

struct OracleAtom {
  std::vector<double> belief;
  double weight = 0.0;
};

class BayesOracle {
 public:
  struct World {
    std::vector<std::vector<std::size_t>> states;  ///< [player][period]
    std::vector<std::vector<std::size_t>> obs;     ///< [player][period - 1]
    double prob = 0.0;                             ///< joint with the common history
  };

  BayesOracle(GameSpec spec, StrategyFn strategy) : spec_(std::move(spec)), strategy_(std::move(strategy)) {}

  /// Posterior on the current own state from own observations and the common history.
  std::vector<double> posterior(std::size_t player, const std::vector<std::size_t>& history,
                                const std::vector<std::size_t>& obs) const {
    const std::size_t nx = spec_.spaces[player].states;
    std::vector<double> alpha = spec_.prior[player];
    for (std::size_t k = 0; k < history.size(); ++k) {
      std::vector<double> next(nx, 0.0);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < nx; ++y)
          next[y] += alpha[x] * transition(player, history[k], x, y) * observation(player, history[k], y, obs[k]);
      alpha = next;
    }
    double z = 0.0;
    for (double v : alpha) z += v;
    for (double& v : alpha) v /= z;
    return alpha;
  }

  /// Every path consistent with the history, weighted by its joint probability.
  std::vector<World> worlds(const std::vector<std::size_t>& history) const {
    const std::size_t n = spec_.num_players;
    std::vector<World> out;
    std::vector<std::size_t> x(n, 0);
    std::function<void(std::size_t, double)> roots = [&](std::size_t i, double p) {
      if (i == n) {
        World w;
        w.obs.assign(n, {});
        for (std::size_t j = 0; j < n; ++j) w.states.push_back({x[j]});
        w.prob = p;
        out.push_back(std::move(w));
        return;
      }
      for (std::size_t s = 0; s < spec_.spaces[i].states; ++s) {
        x[i] = s;
        roots(i + 1, p * spec_.prior[i][s]);
      }
    };
    roots(0, 1.0);

    std::vector<std::size_t> prefix;
    for (std::size_t k = 0; k < history.size(); ++k) {
      const std::size_t a = history[k];
      std::vector<World> next;
      for (const auto& w : out) {
        double p = w.prob;
        for (std::size_t i = 0; i < n && p > 0.0; ++i)
          p *= strategy_(k + 1, prefix, i, posterior(i, prefix, w.obs[i]))[spec_.action_of(a, i)];
        if (p <= 0.0) continue;
        extend(w, a, 0, p, next);
      }
      out = std::move(next);
      prefix.push_back(a);
    }
    return out;
  }

  /// Probability of the history and, per player, the distribution of the private belief.
  std::pair<double, std::vector<std::vector<OracleAtom>>> public_belief(
      const std::vector<std::size_t>& history) const {
    const auto ws = worlds(history);
    double total = 0.0;
    for (const auto& w : ws) total += w.prob;
    std::vector<std::vector<OracleAtom>> out(spec_.num_players);
    if (total <= 0.0) return {0.0, out};
    for (std::size_t i = 0; i < spec_.num_players; ++i) {
      for (const auto& w : ws) {
        const auto xi = posterior(i, history, w.obs[i]);
        auto it = std::find_if(out[i].begin(), out[i].end(), [&](const OracleAtom& a) {
          for (std::size_t s = 0; s < xi.size(); ++s)
            if (std::abs(a.belief[s] - xi[s]) > 1e-11) return false;
          return true;
        });
        if (it == out[i].end())
          out[i].push_back({xi, w.prob / total});
        else
          it->weight += w.prob / total;
      }
      std::sort(out[i].begin(), out[i].end(),
                [](const OracleAtom& a, const OracleAtom& b) { return a.belief < b.belief; });
    }
    return {total, out};
  }

  /**
   * Largest gap between the conditional joint law of every player's (state path,
   * observation path) given the history and the product of its per-player marginals.
   */
  double factorization_gap(const std::vector<std::size_t>& history) const {
    using Key = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;
    const auto ws = worlds(history);
    const std::size_t n = spec_.num_players;
    double total = 0.0;
    for (const auto& w : ws) total += w.prob;
    if (total <= 0.0) return 0.0;
    std::map<std::vector<Key>, double> joint;
    std::vector<std::map<Key, double>> marginal(n);
    for (const auto& w : ws) {
      std::vector<Key> key;
      for (std::size_t i = 0; i < n; ++i) {
        key.emplace_back(w.states[i], w.obs[i]);
        marginal[i][key.back()] += w.prob / total;
      }
      joint[key] += w.prob / total;
    }
    double gap = 0.0;
    std::vector<Key> combo(n);
    std::function<void(std::size_t, double)> walk = [&](std::size_t i, double p) {
      if (i == n) {
        auto it = joint.find(combo);
        gap = std::max(gap, std::abs((it == joint.end() ? 0.0 : it->second) - p));
        return;
      }
      for (const auto& [k, q] : marginal[i]) {
        combo[i] = k;
        walk(i + 1, p * q);
      }
    };
    walk(0, 1.0);
    return gap;
  }

 private:
  double transition(std::size_t i, std::size_t a, std::size_t x, std::size_t y) const {
    const std::size_t nx = spec_.spaces[i].states;
    return spec_.transition[i][(a * nx + x) * nx + y];
  }
  double observation(std::size_t i, std::size_t a, std::size_t y, std::size_t w) const {
    const std::size_t nx = spec_.spaces[i].states, nw = spec_.spaces[i].observations;
    return spec_.observation[i][(a * nx + y) * nw + w];
  }

  void extend(const World& w, std::size_t a, std::size_t i, double p, std::vector<World>& out) const {
    if (i == spec_.num_players) {
      out.push_back(w);
      out.back().prob = p;
      return;
    }
    const std::size_t x = w.states[i].back();
    for (std::size_t y = 0; y < spec_.spaces[i].states; ++y)
      for (std::size_t o = 0; o < spec_.spaces[i].observations; ++o) {
        const double q = p * transition(i, a, x, y) * observation(i, a, y, o);
        if (q <= 0.0) continue;
        World next = w;
        next.states[i].push_back(y);
        next.obs[i].push_back(o);
        extend(next, a, i + 1, q, out);
      }
  }

  GameSpec spec_;
  StrategyFn strategy_;
};

}  // namespace infocascade::testing
