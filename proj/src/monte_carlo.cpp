#include "infocascade/monte_carlo.hpp"

#include <random>
#include <sstream>

namespace infocascade {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  template <class Probs>
  std::size_t categorical(const Probs& probs) {
    const double u = uniform();
    double cum = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] <= 0.0) continue;
      last = k;
      cum += probs[k];
      if (u < cum) return k;
    }
    return last;
  }

 private:
  std::mt19937_64 gen_;
};

std::vector<double> weights_of(const PublicBelief& pi) {
  std::vector<double> w;
  for (const auto& a : pi.atoms()) w.push_back(a.weight);
  return w;
}

std::string label_cascade(const GameSpec& spec, const TrajectoryRecord& rec) {
  std::optional<std::size_t> first_t, first_a;
  for (std::size_t a = 0; a < rec.entry_time.size(); ++a)
    if (rec.entry_time[a] && (!first_t || *rec.entry_time[a] < *first_t)) {
      first_t = rec.entry_time[a];
      first_a = a;
    }
  if (!first_a) return "none";
  const auto acts = spec.decode_actions(*first_a);
  bool all_invest = true, none_invest = true;
  for (auto a : acts) {
    all_invest = all_invest && a == 1;
    none_invest = none_invest && a == 0;
  }
  double avg = 0.0;
  for (auto x : rec.states) avg += x == 1 ? 1.0 : -1.0;
  if (avg == 0.0 || (!all_invest && !none_invest)) return "neutral";
  const bool high = avg > 0.0;
  return (all_invest == high) ? "good" : "bad";
}

}  // namespace

std::span<const double> RuleStrategy::action_dist(std::size_t node, std::size_t player,
                                                  const PrivateBelief& xi) {
  return rule_.node(node).players.at(player).prescription.at(xi);
}

std::size_t RuleStrategy::child(std::size_t node, std::size_t joint_action) {
  if (auto c = rule_.child(node, joint_action)) return *c;
  std::ostringstream os;
  os << "simulation left the solved tree: node " << node << " has no child for joint action "
     << joint_action;
  throw std::out_of_range(os.str());
}

PolicyStrategy::PolicyStrategy(GameSpec spec, JointPublicBelief root, PolicyBuilder builder)
    : spec_(std::move(spec)), builder_(std::move(builder)) {
  add(1, std::move(root));
}

std::size_t PolicyStrategy::add(std::size_t t, JointPublicBelief belief) {
  Node n{t, std::move(belief), {}, {}};
  for (std::size_t i = 0; i < spec_.num_players; ++i) n.profile.push_back(builder_(n.belief, t, i));
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::span<const double> PolicyStrategy::action_dist(std::size_t node, std::size_t player,
                                                    const PrivateBelief& xi) {
  return nodes_.at(node).profile.at(player).at(xi);
}

std::size_t PolicyStrategy::child(std::size_t node, std::size_t joint_action) {
  if (auto it = nodes_.at(node).children.find(joint_action); it != nodes_[node].children.end())
    return it->second;
  auto next = joint_public_update(spec_, nodes_[node].belief, nodes_[node].profile, joint_action);
  const std::size_t id = add(nodes_[node].t + 1, std::move(next));
  nodes_[node].children.emplace(joint_action, id);
  return id;
}

PolicyBuilder constant_policy(const GameSpec& spec, std::size_t action) {
  return [spec, action](const JointPublicBelief&, std::size_t, std::size_t player) {
    Prescription p(spec.spaces.at(player).actions);
    p.add_pure_cell(PrivateBelief::point(spec.spaces[player].states, 0), action);
    return p;
  };
}

PolicyBuilder myopic_investment_policy(const InvestmentParams& params, std::size_t grid_k) {
  return [params, grid_k](const JointPublicBelief& pi, std::size_t, std::size_t player) {
    const double hat = hat_xi_excluding(pi, player);
    std::vector<PrivateBelief> support;
    for (const auto& a : pi[player].atoms()) support.push_back(a.belief);
    auto p = Prescription::from_rule(2, support, 2, grid_k, [&](const PrivateBelief& xi) {
      return pure_dist(2, invest_gain(params.lambda, xi[1], hat) > 0.0 ? 1 : 0);
    });
    p.set_anchored(support.size());
    return p;
  };
}

std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t i) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(i));
}

MonteCarloResult monte_carlo(StrategyTree& tree, const MonteCarloConfig& config) {
  const GameSpec& spec = tree.spec();
  const std::size_t n = spec.num_players;
  const std::size_t na = spec.joint_actions();
  MonteCarloResult result;
  auto& sum = result.summary;
  sum.trajectories = config.trajectories;
  sum.horizon = spec.horizon;
  if (config.investment) sum.entry_counts.assign(na, std::vector<std::size_t>(spec.horizon + 1, 0));
  std::size_t confident = 0, constant_play = 0;
  double error = 0.0;

  result.trajectories.reserve(config.trajectories);
  for (std::size_t traj = 0; traj < config.trajectories; ++traj) {
    Draw draw(trajectory_seed(config.seed, traj));
    TrajectoryRecord rec;
    std::size_t node = tree.root();
    std::vector<PrivateBelief> xi(n);
    rec.states.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pi = tree.belief(node)[i];
      xi[i] = pi.atoms()[draw.categorical(weights_of(pi))].belief;
      rec.states[i] = draw.categorical(xi[i].probs);
      if (config.force_state) rec.states[i] = *config.force_state;
    }
    if (config.investment) rec.entry_time.assign(na, std::nullopt);

    for (std::size_t t = 1; t <= spec.horizon; ++t) {
      const auto& mu = tree.belief(node);
      rec.beliefs.push_back(xi);
      std::vector<double> means;
      for (std::size_t i = 0; i < n; ++i) means.push_back(mean_belief(mu[i]).back());
      rec.public_means.push_back(std::move(means));
      if (config.investment) {
        bool any = false;
        for (std::size_t a = 0; a < na; ++a) {
          if (in_analytic_cascade(mu, spec.decode_actions(a), *config.investment)) {
            any = true;
            if (!rec.entry_time[a]) rec.entry_time[a] = t;
          }
        }
        rec.in_cascade.push_back(any);
      }

      std::vector<std::size_t> acts(n);
      for (std::size_t i = 0; i < n; ++i) acts[i] = draw.categorical(tree.action_dist(node, i, xi[i]));
      const std::size_t a = spec.encode_actions(acts);
      rec.actions.push_back(a);
      if (t == spec.horizon) break;

      for (std::size_t i = 0; i < n; ++i) {
        rec.states[i] = draw.categorical(spec.transition_row(i, a, rec.states[i]));
        const std::size_t w = draw.categorical(spec.observation_row(i, a, rec.states[i]));
        xi[i] = private_update(spec, i, xi[i], w, a);
      }
      node = tree.child(node, a);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double p_true = rec.beliefs.back()[i][rec.states[i]];
      if (p_true > 0.99) ++confident;
      error += 1.0 - p_true;
    }
    bool constant = true;
    for (auto a : rec.actions) constant = constant && a == rec.actions.front();
    if (constant) ++constant_play;
    if (config.investment) {
      for (std::size_t a = 0; a < na; ++a)
        ++sum.entry_counts[a][rec.entry_time[a] ? *rec.entry_time[a] - 1 : spec.horizon];
      rec.cascade_label = label_cascade(spec, rec);
      ++sum.cascade_labels[rec.cascade_label];
    }
    result.trajectories.push_back(std::move(rec));
  }

  const double pairs = static_cast<double>(config.trajectories * n);
  if (config.trajectories > 0) {
    sum.fraction_confident = static_cast<double>(confident) / pairs;
    sum.mean_terminal_error = error / pairs;
    sum.fraction_constant_play =
        static_cast<double>(constant_play) / static_cast<double>(config.trajectories);
  }
  return result;
}

}  // namespace infocascade
