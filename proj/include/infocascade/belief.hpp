#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "infocascade/game_model.hpp"

namespace infocascade {

/// Component-wise tolerance under which two private beliefs are the same atom.
inline constexpr double kAtomTolerance = 1e-10;
/// Atoms lighter than this are dropped from public beliefs.
inline constexpr double kPruneWeight = 1e-12;

/// A player's posterior over its own current state.
struct PrivateBelief {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t x) const { return probs[x]; }

  static PrivateBelief point(std::size_t states, std::size_t x);
  /// Binary-state shorthand: probs = {1 - p_high, p_high}.
  static PrivateBelief binary(double p_high);
};

bool same_atom(const PrivateBelief& a, const PrivateBelief& b, double tol = kAtomTolerance);
double max_abs_diff(const PrivateBelief& a, const PrivateBelief& b);

struct Atom {
  PrivateBelief belief;
  double weight = 0.0;
};

/**
 * Finite distribution over a player's private beliefs, as computed from the
 * public action history. Also used for the distribution of next-period
 * private beliefs produced by private_kernel.
 */
class PublicBelief {
 public:
  PublicBelief() = default;
  explicit PublicBelief(std::vector<Atom> atoms, bool off_equilibrium = false);

  static PublicBelief point_mass(PrivateBelief belief);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool off_equilibrium() const { return off_equilibrium_; }
  void set_off_equilibrium(bool flag) { off_equilibrium_ = flag; }

  /// Atoms with weight above kPruneWeight.
  std::vector<const Atom*> support() const;
  /// Index of the atom matching `belief` within `tol`, or npos.
  std::size_t find(const PrivateBelief& belief, double tol = kAtomTolerance) const;
  double weight_of(const PrivateBelief& belief, double tol = kAtomTolerance) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Atom> atoms_;
  bool off_equilibrium_ = false;
};

/// Merges duplicate atoms (within kAtomTolerance), prunes light atoms, renormalises,
/// and orders atoms lexicographically. Merged atoms keep the first-seen coordinates.
PublicBelief normalized(std::vector<Atom> atoms, bool off_equilibrium = false);

/// Like `normalized`, but additionally rounds coordinates and weights to 44 significant bits so
/// that numerically equivalent beliefs become bit-identical (used for node keys).
/// The off-equilibrium flag is dropped: it describes a history, not a belief.
PublicBelief canonical(const PublicBelief& belief);

struct JointPublicBelief {
  std::vector<PublicBelief> per_player;

  std::size_t num_players() const { return per_player.size(); }
  const PublicBelief& operator[](std::size_t i) const { return per_player[i]; }
  bool off_equilibrium() const;

  static JointPublicBelief point_mass_prior(const GameSpec& spec);
};

JointPublicBelief canonical(const JointPublicBelief& belief);
/// Hash of the exact bit patterns of a (canonical) joint belief at time t.
std::uint64_t belief_key(std::size_t t, const JointPublicBelief& belief);

/// Thrown when an observation has zero predictive probability.
class ImpossibleObservation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Predictive probability of observation w after joint action a, given own belief xi.
double observation_probability(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                               std::size_t w, std::size_t joint_action);

/// Bayes posterior on the next own state given (xi, a, w).
PrivateBelief private_update(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                             std::size_t w, std::size_t joint_action);

/// Distribution of the next private belief given xi and the joint action.
PublicBelief private_kernel(const GameSpec& spec, std::size_t player, const PrivateBelief& xi,
                            std::size_t joint_action);

class Prescription;
using PrescriptionProfile = std::vector<Prescription>;

/// Public-belief update for one player after observing joint action a under prescription
/// gamma. Uses the propagate-all-atoms branch (flagged off_equilibrium) when a^i has zero
/// probability under gamma.
PublicBelief public_update(const GameSpec& spec, std::size_t player, const PublicBelief& pi,
                           const Prescription& gamma, std::size_t joint_action);

JointPublicBelief joint_public_update(const GameSpec& spec, const JointPublicBelief& pi,
                                      const PrescriptionProfile& gamma, std::size_t joint_action);

/// Expected private belief under pi (a vector over own states).
std::vector<double> mean_belief(const PublicBelief& pi);

}  // namespace infocascade
