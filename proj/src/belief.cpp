#include "infocascade/belief.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "infocascade/prescription.hpp"

namespace infocascade {

namespace {

// Keeps 44 significant bits. Relative rather than absolute rounding, so that beliefs
// close to 0 or 1 keep the digits that later updates depend on.
double snap(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  return std::ldexp(std::round(std::ldexp(mant, 44)), exp - 44);
}

bool lex_less(const PrivateBelief& a, const PrivateBelief& b) {
  return std::lexicographical_compare(a.probs.begin(), a.probs.end(), b.probs.begin(),
                                      b.probs.end());
}

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void mix(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  void mix(double v) { mix(std::bit_cast<std::uint64_t>(v)); }
};

std::vector<double> predicted(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                              std::size_t joint_action) {
  const std::size_t n = spec.spaces.at(player).states;
  if (xi.size() != n) throw IndexError("private belief has wrong dimension");
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    if (xi[x] == 0.0) continue;
    const auto row = spec.transition_row(player, joint_action, x);
    for (std::size_t y = 0; y < n; ++y) out[y] += xi[x] * row[y];
  }
  return out;
}

}  // namespace

PrivateBelief PrivateBelief::point(std::size_t states, std::size_t x) {
  PrivateBelief b{std::vector<double>(states, 0.0)};
  b.probs.at(x) = 1.0;
  return b;
}

PrivateBelief PrivateBelief::binary(double p_high) { return PrivateBelief{{1.0 - p_high, p_high}}; }

double max_abs_diff(const PrivateBelief& a, const PrivateBelief& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

bool same_atom(const PrivateBelief& a, const PrivateBelief& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

PublicBelief::PublicBelief(std::vector<Atom> atoms, bool off_equilibrium)
    : atoms_(std::move(atoms)), off_equilibrium_(off_equilibrium) {}

PublicBelief PublicBelief::point_mass(PrivateBelief belief) {
  std::vector<Atom> atoms;
  atoms.push_back({std::move(belief), 1.0});
  return PublicBelief(std::move(atoms));
}

std::vector<const Atom*> PublicBelief::support() const {
  std::vector<const Atom*> out;
  for (const auto& a : atoms_)
    if (a.weight > kPruneWeight) out.push_back(&a);
  return out;
}

std::size_t PublicBelief::find(const PrivateBelief& belief, double tol) const {
  for (std::size_t k = 0; k < atoms_.size(); ++k)
    if (same_atom(atoms_[k].belief, belief, tol)) return k;
  return npos;
}

double PublicBelief::weight_of(const PrivateBelief& belief, double tol) const {
  const std::size_t k = find(belief, tol);
  return k == npos ? 0.0 : atoms_[k].weight;
}

PublicBelief normalized(std::vector<Atom> atoms, bool off_equilibrium) {
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (auto& a : atoms) {
    if (a.weight <= 0.0) continue;
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Atom& m) { return same_atom(m.belief, a.belief); });
    if (it != merged.end())
      it->weight += a.weight;
    else
      merged.push_back(std::move(a));
  }
  double total = 0.0;
  for (const auto& a : merged) total += a.weight;
  std::erase_if(merged, [&](const Atom& a) { return a.weight / total <= kPruneWeight; });
  total = 0.0;
  for (const auto& a : merged) total += a.weight;
  for (auto& a : merged) a.weight /= total;
  std::sort(merged.begin(), merged.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.belief, b.belief); });
  return PublicBelief(std::move(merged), off_equilibrium);
}

PublicBelief canonical(const PublicBelief& belief) {
  std::vector<Atom> atoms = belief.atoms();
  for (auto& a : atoms) {
    for (auto& p : a.belief.probs) p = snap(p);
    a.weight = snap(a.weight);
  }
  return normalized(std::move(atoms));
}

bool JointPublicBelief::off_equilibrium() const {
  return std::any_of(per_player.begin(), per_player.end(),
                     [](const PublicBelief& p) { return p.off_equilibrium(); });
}

JointPublicBelief JointPublicBelief::point_mass_prior(const GameSpec& spec) {
  JointPublicBelief out;
  for (std::size_t i = 0; i < spec.num_players; ++i)
    out.per_player.push_back(PublicBelief::point_mass(PrivateBelief{spec.prior.at(i)}));
  return out;
}

JointPublicBelief canonical(const JointPublicBelief& belief) {
  JointPublicBelief out;
  out.per_player.reserve(belief.num_players());
  for (const auto& p : belief.per_player) out.per_player.push_back(canonical(p));
  return out;
}

std::uint64_t belief_key(std::size_t t, const JointPublicBelief& belief) {
  Fnv1a h;
  h.mix(static_cast<std::uint64_t>(t));
  h.mix(static_cast<std::uint64_t>(belief.num_players()));
  for (const auto& p : belief.per_player) {
    h.mix(static_cast<std::uint64_t>(p.size()));
    for (const auto& a : p.atoms()) {
      for (double v : a.belief.probs) h.mix(v);
      h.mix(a.weight);
    }
  }
  return h.h;
}

double observation_probability(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                               std::size_t w, std::size_t joint_action) {
  if (w >= spec.spaces.at(player).observations) throw IndexError("observation out of range");
  const auto pred = predicted(spec, player, xi, joint_action);
  double p = 0.0;
  for (std::size_t y = 0; y < pred.size(); ++y)
    p += pred[y] * spec.observation_row(player, joint_action, y)[w];
  return p;
}

PrivateBelief private_update(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                             std::size_t w, std::size_t joint_action) {
  if (w >= spec.spaces.at(player).observations) throw IndexError("observation out of range");
  const auto pred = predicted(spec, player, xi, joint_action);
  PrivateBelief out{std::vector<double>(pred.size(), 0.0)};
  double total = 0.0;
  for (std::size_t y = 0; y < pred.size(); ++y) {
    out.probs[y] = pred[y] * spec.observation_row(player, joint_action, y)[w];
    total += out.probs[y];
  }
  if (!(total > 0.0)) throw ImpossibleObservation("observation has zero predictive probability");
  for (auto& v : out.probs) v /= total;
  return out;
}

PublicBelief private_kernel(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                            std::size_t joint_action) {
  const auto pred = predicted(spec, player, xi, joint_action);
  const std::size_t m = spec.spaces[player].observations;
  std::vector<Atom> atoms;
  atoms.reserve(m);
  for (std::size_t w = 0; w < m; ++w) {
    PrivateBelief post{std::vector<double>(pred.size(), 0.0)};
    double pw = 0.0;
    for (std::size_t y = 0; y < pred.size(); ++y) {
      post.probs[y] = pred[y] * spec.observation_row(player, joint_action, y)[w];
      pw += post.probs[y];
    }
    if (!(pw > 0.0)) continue;
    for (auto& v : post.probs) v /= pw;
    atoms.push_back({std::move(post), pw});
  }
  return normalized(std::move(atoms));
}

PublicBelief public_update(const GameSpec& spec, std::size_t player, const PublicBelief& pi,
                           const Prescription& gamma, std::size_t joint_action) {
  const std::size_t own = spec.action_of(joint_action, player);
  double normalizer = 0.0;
  std::vector<double> likelihood(pi.size());
  for (std::size_t k = 0; k < pi.size(); ++k) {
    likelihood[k] = gamma.prob(pi.atoms()[k].belief, own);
    normalizer += pi.atoms()[k].weight * likelihood[k];
  }
  const bool zero_branch = !(normalizer > 0.0);
  std::vector<Atom> next;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    const auto& atom = pi.atoms()[k];
    const double w = zero_branch ? atom.weight : atom.weight * likelihood[k] / normalizer;
    if (w <= 0.0) continue;
    const auto spread = private_kernel(spec, player, atom.belief, joint_action);
    for (const auto& s : spread.atoms()) next.push_back({s.belief, w * s.weight});
  }
  return normalized(std::move(next), zero_branch);
}

JointPublicBelief joint_public_update(const GameSpec& spec, const JointPublicBelief& pi,
                                      const PrescriptionProfile& gamma, std::size_t joint_action) {
  if (pi.num_players() != spec.num_players || gamma.size() != spec.num_players)
    throw IndexError("belief/prescription profile arity mismatch");
  JointPublicBelief out;
  out.per_player.reserve(spec.num_players);
  for (std::size_t i = 0; i < spec.num_players; ++i)
    out.per_player.push_back(public_update(spec, i, pi[i], gamma[i], joint_action));
  return out;
}

std::vector<double> mean_belief(const PublicBelief& pi) {
  if (pi.size() == 0) return {};
  std::vector<double> out(pi.atoms().front().belief.size(), 0.0);
  for (const auto& a : pi.atoms())
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += a.weight * a.belief[x];
  return out;
}

}  // namespace infocascade
