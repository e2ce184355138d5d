#include "implquad/seedbalance.hpp"

#include <cmath>
#include <numeric>

#include "implquad/error.hpp"

namespace implquad {

namespace {

// ceil that ignores rounding noise in the last few ulps, so an allocation that
// is exactly 5 in real arithmetic does not become 6.
unsigned ceil_seeds(double x) {
  const double snapped = std::nearbyint(x);
  if (std::abs(x - snapped) <= 1e-10 * std::max(1.0, x)) return static_cast<unsigned>(std::max(1.0, snapped));
  return static_cast<unsigned>(std::max(1.0, std::ceil(x)));
}

double variance_at(const std::vector<double>& variance, std::size_t k) {
  return variance.empty() ? 1.0 : variance[k];
}

}  // namespace

double goal_from_seeds(unsigned seeds_per_node) {
  if (seeds_per_node == 0) throw Error(ErrorKind::Argument, "seeds per node must be at least 1");
  return 1.0 / std::sqrt(static_cast<double>(seeds_per_node));
}

double SeedAllocation::achieved_error(const std::vector<double>& weights, const std::vector<double>& variance) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < seeds.size() && k < weights.size(); ++k) {
    if (seeds[k] == 0) continue;
    sum += std::sqrt(variance_at(variance, k) / static_cast<double>(seeds[k])) * weights[k];
  }
  return sum;
}

SeedAllocation balance_seeds(const std::vector<double>& weights, double accuracy_goal,
                             const std::vector<double>& variance) {
  if (!(accuracy_goal > 0.0) || !std::isfinite(accuracy_goal)) {
    throw Error(ErrorKind::Argument, "accuracy goal must be positive");
  }
  if (!variance.empty() && variance.size() != weights.size()) {
    throw Error(ErrorKind::Argument, "variance multipliers must align with the weights");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) throw Error(ErrorKind::Argument, "weights must be non-negative");
    if (!(variance_at(variance, k) > 0.0)) throw Error(ErrorKind::Argument, "variance multipliers must be positive");
  }
  const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total_weight > 0.0)) throw Error(ErrorKind::Argument, "weights must not all be zero");

  // shape_k = (sigma_k^2)^(1/3) (w_k / 2)^(-1/3); eps_k = A shape_k.
  std::vector<double> shape(weights.size(), 0.0);
  double constraint = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    shape[k] = std::cbrt(variance_at(variance, k) / (weights[k] / 2.0));
    constraint += shape[k] * weights[k];
  }

  SeedAllocation out;
  out.accuracy_goal = accuracy_goal;
  out.scaling_constant = accuracy_goal / constraint;
  out.seeds.assign(weights.size(), 0);
  out.continuous_error.assign(weights.size(), 0.0);
  out.budget_slack = true;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double eps = out.scaling_constant * shape[k];
    out.continuous_error[k] = eps;
    const double continuous_seeds = variance_at(variance, k) / (eps * eps);
    out.seeds[k] = ceil_seeds(continuous_seeds);
    if (continuous_seeds > 1.0 + 1e-10) out.budget_slack = false;
    out.total += out.seeds[k];
  }
  return out;
}

SeedAllocation uniform_seeds(std::size_t node_count, unsigned seeds_per_node) {
  SeedAllocation out;
  out.accuracy_goal = goal_from_seeds(seeds_per_node);
  out.seeds.assign(node_count, seeds_per_node);
  out.continuous_error.assign(node_count, out.accuracy_goal);
  out.scaling_constant = 0.0;
  out.total = node_count * seeds_per_node;
  return out;
}

}  // namespace implquad
