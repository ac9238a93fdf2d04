#include "infocascade/prescription.hpp"

#include <limits>
#include <stdexcept>

namespace infocascade {

namespace {

void compositions(std::size_t parts, std::size_t total, std::vector<std::size_t>& prefix,
                  std::vector<std::vector<std::size_t>>& out) {
  if (prefix.size() + 1 == parts) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t c = 0; c <= total; ++c) {
    prefix.push_back(c);
    compositions(parts, total - c, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<PrivateBelief> simplex_grid(std::size_t states, std::size_t k) {
  if (states == 0) throw std::invalid_argument("simplex grid needs at least one state");
  if (states == 1) return {PrivateBelief{{1.0}}};
  if (k < 2) throw std::invalid_argument("simplex grid needs at least two points per dimension");
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> prefix;
  compositions(states, k - 1, prefix, counts);
  const double denom = static_cast<double>(k - 1);
  std::vector<PrivateBelief> out;
  out.reserve(counts.size());
  for (const auto& c : counts) {
    PrivateBelief b{std::vector<double>(states)};
    for (std::size_t x = 0; x < states; ++x) b.probs[x] = static_cast<double>(c[x]) / denom;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<double> pure_dist(std::size_t num_actions, std::size_t action) {
  if (action >= num_actions) throw IndexError("action index out of range");
  std::vector<double> d(num_actions, 0.0);
  d[action] = 1.0;
  return d;
}

Prescription Prescription::from_rule(
    std::size_t num_actions, std::span<const PrivateBelief> support, std::size_t states,
    std::size_t grid_k, const std::function<std::vector<double>(const PrivateBelief&)>& rule) {
  Prescription p(num_actions);
  for (const auto& s : support) p.add_cell(s, rule(s));
  for (auto& g : simplex_grid(states, grid_k)) {
    auto d = rule(g);
    p.add_cell(std::move(g), std::move(d));
  }
  return p;
}

Prescription Prescription::constant(std::size_t num_actions, std::size_t action, std::size_t states,
                                    std::size_t grid_k) {
  return from_rule(num_actions, {}, states, grid_k,
                   [&](const PrivateBelief&) { return pure_dist(num_actions, action); });
}

void Prescription::add_cell(PrivateBelief cell, std::vector<double> dist) {
  if (dist.size() != num_actions_) throw IndexError("action distribution has wrong size");
  cells_.push_back(std::move(cell));
  dists_.push_back(std::move(dist));
}

void Prescription::add_pure_cell(PrivateBelief cell, std::size_t action) {
  add_cell(std::move(cell), pure_dist(num_actions_, action));
}

void Prescription::set_dist(std::size_t c, std::vector<double> dist) {
  if (c >= cells_.size()) throw IndexError("cell index out of range");
  if (dist.size() != num_actions_) throw IndexError("action distribution has wrong size");
  dists_[c] = std::move(dist);
}

std::size_t Prescription::nearest_cell(const PrivateBelief& xi) const {
  if (cells_.empty()) throw std::logic_error("prescription has no cells");
  for (std::size_t c = 0; c < anchored_ && c < cells_.size(); ++c)
    if (same_atom(cells_[c], xi)) return c;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    if (cell.size() != xi.size()) throw IndexError("private belief has wrong dimension");
    double d = 0.0;
    for (std::size_t x = 0; x < xi.size(); ++x) {
      const double diff = cell[x] - xi[x];
      d += diff * diff;
    }
    if (d == 0.0) return c;
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace infocascade
