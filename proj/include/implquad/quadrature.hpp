#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "implquad/basis.hpp"
#include "implquad/ingest.hpp"
#include "implquad/random.hpp"

namespace implquad {

// Weights at or below this are treated as eliminated.
inline constexpr double kZeroWeight = 1e-14;

// A positive-weight rule whose nodes are a subset of a SampleSet.
struct QuadratureRule {
  std::vector<std::size_t> node_indices;  // ascending, into the source SampleSet
  std::vector<double> weights;
  BasisSpec basis;
  std::string source_hash;
  std::uint64_t rng_seed = 0;
  bool deterministic = false;

  std::size_t size() const { return node_indices.size(); }
  std::size_t degree() const { return basis.degree(); }
};

// Rules of decreasing node count; each node set is a subset of its predecessor's.
struct RuleSequence {
  std::vector<QuadratureRule> rules;
};

enum class Direction { Plus, Minus };

struct Elimination {
  std::vector<std::size_t> nodes;
  std::vector<double> weights;
  double alpha = 0.0;
  std::size_t pivot = 0;  // node that attained the minimum ratio
  std::vector<std::size_t> removed;
};

// Unit null vector of a wide (r x m, m > r) system. The sign is fixed so that
// the first entry of significant magnitude is positive; `Direction::Plus`
// refers to this orientation. Throws CannotEliminate when m <= r and
// RankDeficiencyError when the rows are numerically dependent.
Eigen::VectorXd null_vector(const Eigen::MatrixXd& rows);

// w <- w - alpha * (+/-c) with alpha = min(w_k / c_k | c_k > 0), smallest-index
// tie-break. Every node whose updated weight is <= kZeroWeight is dropped.
Elimination eliminate_along(const std::vector<std::size_t>& nodes, const std::vector<double>& weights,
                            const Eigen::VectorXd& null_vec, Direction direction);

// One elimination step on `rows` (r x nodes), null vector by SVD.
Elimination eliminate_node(const std::vector<std::size_t>& nodes, const std::vector<double>& weights,
                           const Eigen::MatrixXd& rows, Direction direction);

struct ConstructOptions {
  std::uint64_t rng_seed = 0;
  // Always +c instead of a seeded coin flip per step.
  bool deterministic = false;
};

// Reduces the K-point empirical rule (weights 1/K) to at most `node_budget`
// nodes that reproduce the first `node_budget` empirical moments.
QuadratureRule construct_implicit_rule(const SampleSet& samples, std::size_t node_budget,
                                       const ConstructOptions& options = {});

// Alternately drops the last basis function and one node, from the full rule
// down to a single node.
RuleSequence build_sequence(const QuadratureRule& rule, const SampleSet& samples, std::uint64_t rng_seed);

using NodeValues = std::map<std::size_t, double>;

double apply_rule(const QuadratureRule& rule, const NodeValues& node_values);

// Member of the sequence used for an n-node estimate: the largest rule with at
// most n nodes (exactly n unless ties removed several nodes at once).
const QuadratureRule& member_with_nodes(const RuleSequence& sequence, std::size_t n);

// Mean over sequences of |A_n[u] - A_N[u]|.
double error_estimate(const std::vector<RuleSequence>& sequences, const NodeValues& node_values, std::size_t n);

struct MomentCheck {
  double orthonormal = 0.0;  // max |sum_k psi_j(x_k) w_k - mean psi_j|
  double monomial = 0.0;     // same in the raw monomial basis on [0,1]^d
  double weight_sum_error = 0.0;
  double min_weight = 0.0;
};

MomentCheck check_moments(const QuadratureRule& rule, const SampleSet& samples);

}  // namespace implquad
