#pragma once

#include <cstddef>
#include <vector>

namespace implquad {

struct SeedAllocation {
  std::vector<unsigned> seeds;           // S_k, aligned with the rule's nodes
  std::vector<double> continuous_error;  // eps_k before rounding
  double accuracy_goal = 0.0;            // the error budget
  double scaling_constant = 0.0;         // A in eps_k = A (w_k / 2)^(-1/3)
  std::size_t total = 0;
  bool budget_slack = false;             // every S_k rounded up to 1

  // sum_k S_k^(-1/2) w_k (variance multipliers included) for the rounded seeds.
  double achieved_error(const std::vector<double>& weights, const std::vector<double>& variance = {}) const;
};

// Minimises sum_k S_k subject to sum_k eps_k w_k = goal with eps_k = sigma_k S_k^(-1/2).
// Lagrange solution: eps_k = A sigma_k^(2/3) (w_k / 2)^(-1/3), S_k = ceil(sigma_k^2 / eps_k^2).
// `variance` holds optional per-node sigma_k^2 multipliers (default 1).
// Zero weights get zero seeds; negative weights and a non-positive goal are
// argument errors.
SeedAllocation balance_seeds(const std::vector<double>& weights, double accuracy_goal,
                             const std::vector<double>& variance = {});

// S_k = seeds_per_node everywhere; goal back-computed as seeds_per_node^(-1/2).
SeedAllocation uniform_seeds(std::size_t node_count, unsigned seeds_per_node);

// Goal equivalent to a fixed number of seeds per node.
double goal_from_seeds(unsigned seeds_per_node);

}  // namespace implquad
