#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "infocascade/belief.hpp"

namespace infocascade {

inline constexpr std::size_t kDefaultGridSize = 51;

/// Uniform grid on the probability simplex over `states` outcomes with `k` points per
/// dimension (coordinates are multiples of 1/(k-1)), in lexicographic order.
std::vector<PrivateBelief> simplex_grid(std::size_t states, std::size_t k);

/**
 * Map from private-belief cells to action distributions. Beliefs that are not
 * cells are resolved to the nearest cell (Euclidean; ties to the lower index).
 * The first `anchored()` cells (the support atoms of a solved node) take precedence
 * over the grid whenever a belief matches one of them within kAtomTolerance.
 */
class Prescription {
 public:
  Prescription() = default;
  explicit Prescription(std::size_t num_actions) : num_actions_(num_actions) {}

  /// Cells are `support` followed by the canonical grid, each assigned rule(cell).
  static Prescription from_rule(std::size_t num_actions, std::span<const PrivateBelief> support,
                                std::size_t states, std::size_t grid_k,
                                const std::function<std::vector<double>(const PrivateBelief&)>& rule);
  /// Same action with probability 1 for every belief.
  static Prescription constant(std::size_t num_actions, std::size_t action, std::size_t states,
                               std::size_t grid_k = kDefaultGridSize);

  void add_cell(PrivateBelief cell, std::vector<double> dist);
  void add_pure_cell(PrivateBelief cell, std::size_t action);

  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_cells() const { return cells_.size(); }
  const PrivateBelief& cell(std::size_t c) const { return cells_[c]; }
  std::span<const double> dist(std::size_t c) const { return dists_[c]; }
  void set_dist(std::size_t c, std::vector<double> dist);
  std::size_t anchored() const { return anchored_; }
  void set_anchored(std::size_t n) { anchored_ = n; }

  std::size_t nearest_cell(const PrivateBelief& xi) const;
  std::span<const double> at(const PrivateBelief& xi) const { return dists_[nearest_cell(xi)]; }
  double prob(const PrivateBelief& xi, std::size_t action) const { return at(xi)[action]; }

 private:
  std::size_t num_actions_ = 0;
  std::size_t anchored_ = 0;
  std::vector<PrivateBelief> cells_;
  std::vector<std::vector<double>> dists_;
};

std::vector<double> pure_dist(std::size_t num_actions, std::size_t action);

}  // namespace infocascade
