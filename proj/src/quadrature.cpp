#include "implquad/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "implquad/error.hpp"

namespace implquad {

namespace {

struct Ratio {
  double alpha = std::numeric_limits<double>::infinity();
  std::size_t position = 0;
};

// alpha = min(w_k / c_k | c_k > 0); first position wins ties.
Ratio ratio_test(const std::vector<double>& weights, const Eigen::VectorXd& c) {
  Ratio best;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double ck = c(static_cast<Eigen::Index>(k));
    if (ck <= 0.0) continue;
    const double ratio = weights[k] / ck;
    if (ratio < best.alpha) best = {ratio, k};
  }
  return best;
}

// Sign that makes the first significant entry positive.
double canonical_sign(const Eigen::VectorXd& c) {
  const double scale = c.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (std::abs(c(k)) > 1e-12 * scale) return c(k) > 0.0 ? 1.0 : -1.0;
  }
  return 1.0;
}

Direction draw_direction(Rng& rng, bool deterministic) {
  if (deterministic) return Direction::Plus;
  return coin_flip(rng) ? Direction::Plus : Direction::Minus;
}

Eigen::VectorXd target_moments(const SampleBasis& basis, std::size_t rows) {
  return basis.values().leftCols(static_cast<Eigen::Index>(rows)).colwise().mean().transpose();
}

// Re-solves the moment system on a fixed node set; keeps the old weights
// unless the fresh solution is strictly positive.
void refine_weights(const Eigen::MatrixXd& system, const Eigen::VectorXd& target, std::vector<double>& weights) {
  if (weights.empty()) return;
  const Eigen::VectorXd solution = system.colPivHouseholderQr().solve(target);
  if (!solution.allFinite() || solution.minCoeff() <= kZeroWeight) return;
  const Eigen::VectorXd old = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  if ((system * solution - target).cwiseAbs().maxCoeff() > (system * old - target).cwiseAbs().maxCoeff()) return;
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = solution(static_cast<Eigen::Index>(k));
}

}  // namespace

Eigen::VectorXd null_vector(const Eigen::MatrixXd& rows) {
  const Eigen::Index r = rows.rows();
  const Eigen::Index m = rows.cols();
  if (m <= r) {
    throw Error(ErrorKind::CannotEliminate, "no null vector: system has " + std::to_string(r) + " rows and " +
                                                std::to_string(m) + " nodes");
  }
  if (r == 0) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    c(0) = 1.0;
    return c;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(r - 1) > kRankTolerance * s(0))) {
    throw RankDeficiencyError(static_cast<std::size_t>(r), "moment system with " + std::to_string(r) +
                                                               " rows is numerically rank deficient");
  }
  Eigen::VectorXd c = svd.matrixV().col(m - 1);
  if (!(c.norm() > 0.5)) throw RankDeficiencyError(static_cast<std::size_t>(r), "numerically trivial null vector");
  return c * canonical_sign(c);
}

Elimination eliminate_along(const std::vector<std::size_t>& nodes, const std::vector<double>& weights,
                            const Eigen::VectorXd& null_vec, Direction direction) {
  if (nodes.size() != weights.size() || static_cast<Eigen::Index>(nodes.size()) != null_vec.size()) {
    throw Error(ErrorKind::Consistency, "node, weight and null vector lengths differ");
  }
  if (nodes.size() < 2) throw Error(ErrorKind::CannotEliminate, "need at least two nodes to eliminate one");
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::Argument, "weights must be positive before elimination");
  }
  const Eigen::VectorXd c = direction == Direction::Plus ? null_vec : Eigen::VectorXd(-null_vec);
  const Ratio ratio = ratio_test(weights, c);
  if (!std::isfinite(ratio.alpha)) {
    throw RankDeficiencyError(0, "null vector has no positive entry in the chosen direction");
  }
  Elimination out;
  out.alpha = ratio.alpha;
  out.pivot = nodes[ratio.position];
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double w = k == ratio.position ? 0.0 : weights[k] - ratio.alpha * c(static_cast<Eigen::Index>(k));
    if (w <= kZeroWeight) {
      out.removed.push_back(nodes[k]);
    } else {
      out.nodes.push_back(nodes[k]);
      out.weights.push_back(w);
    }
  }
  return out;
}

Elimination eliminate_node(const std::vector<std::size_t>& nodes, const std::vector<double>& weights,
                           const Eigen::MatrixXd& rows, Direction direction) {
  if (static_cast<std::size_t>(rows.cols()) != nodes.size()) {
    throw Error(ErrorKind::Consistency, "system column count differs from node count");
  }
  return eliminate_along(nodes, weights, null_vector(rows), direction);
}

QuadratureRule construct_implicit_rule(const SampleSet& samples, std::size_t node_budget,
                                       const ConstructOptions& options) {
  const std::size_t k_samples = samples.size();
  if (node_budget == 0) throw Error(ErrorKind::Argument, "node budget must be at least 1");
  if (node_budget > k_samples) throw Error(ErrorKind::Argument, "node budget exceeds sample count");

  const std::size_t n = node_budget;
  const auto ni = static_cast<Eigen::Index>(n);
  const SampleBasis basis(samples.scaled(), BasisSpec::graded_lex(samples.dimension(), n));
  const Eigen::MatrixXd& psi = basis.values();
  const Eigen::VectorXd target = target_moments(basis, n);

  std::vector<double> weight(k_samples, 1.0 / static_cast<double>(k_samples));
  Rng rng(options.rng_seed);

  // Working basis: n linearly independent nodes. Every other node enters once
  // as the extra column of an (n x n+1) window whose null vector is
  // c = (M v, -1), M the inverse of the basis block.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoting(psi.transpose());
  pivoting.setThreshold(kRankTolerance);
  if (pivoting.rank() < ni) {
    throw RankDeficiencyError(n, "basis of size " + std::to_string(n) + " is rank deficient on the samples");
  }
  std::vector<std::size_t> active(n);
  for (Eigen::Index i = 0; i < ni; ++i) active[static_cast<std::size_t>(i)] = static_cast<std::size_t>(pivoting.colsPermutation().indices()(i));
  std::vector<char> in_basis(k_samples, 0);
  for (std::size_t b : active) in_basis[b] = 1;

  Eigen::MatrixXd block(ni, ni);
  Eigen::MatrixXd inverse;
  auto refactor = [&] {
    for (Eigen::Index i = 0; i < ni; ++i) block.col(i) = psi.row(static_cast<Eigen::Index>(active[static_cast<std::size_t>(i)])).transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
    inverse = lu.inverse();
  };
  refactor();
  std::size_t updates_since_refactor = 0;
  const std::size_t refactor_every = std::max<std::size_t>(n, 32);

  std::vector<std::size_t> order(n + 1);
  std::vector<std::size_t> window_nodes(n + 1);
  std::vector<double> window_weights(n + 1);
  Eigen::VectorXd window_c(ni + 1);
  Eigen::VectorXd raw_c(ni + 1);

  for (std::size_t j = 0; j < k_samples; ++j) {
    if (in_basis[j]) continue;
    const Eigen::VectorXd d = inverse * psi.row(static_cast<Eigen::Index>(j)).transpose();
    raw_c.head(ni) = d;
    raw_c(ni) = -1.0;

    // Window sorted by sample index so the sign convention matches null_vector().
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto node_of = [&](std::size_t slot) { return slot < n ? active[slot] : j; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return node_of(a) < node_of(b); });
    for (std::size_t s = 0; s <= n; ++s) {
      window_nodes[s] = node_of(order[s]);
      window_weights[s] = weight[window_nodes[s]];
      window_c(static_cast<Eigen::Index>(s)) = raw_c(static_cast<Eigen::Index>(order[s]));
    }
    window_c *= canonical_sign(window_c);
    if (draw_direction(rng, options.deterministic) == Direction::Minus) window_c = -window_c;

    const Ratio ratio = ratio_test(window_weights, window_c);
    for (std::size_t s = 0; s <= n; ++s) {
      const std::size_t node = window_nodes[s];
      const double w = s == ratio.position ? 0.0 : window_weights[s] - ratio.alpha * window_c(static_cast<Eigen::Index>(s));
      weight[node] = std::max(w, 0.0);
    }
    const std::size_t leaving = window_nodes[ratio.position];
    if (leaving == j) continue;

    // Candidate j replaces the basis node that left.
    const auto slot = static_cast<Eigen::Index>(std::find(active.begin(), active.end(), leaving) - active.begin());
    in_basis[leaving] = 0;
    in_basis[j] = 1;
    active[static_cast<std::size_t>(slot)] = j;
    if (++updates_since_refactor >= refactor_every || std::abs(d(slot)) < 1e-8 * d.cwiseAbs().maxCoeff()) {
      refactor();
      updates_since_refactor = 0;
    } else {
      const Eigen::RowVectorXd pivot_row = inverse.row(slot) / d(slot);
      inverse.noalias() -= d * pivot_row;
      inverse.row(slot) = pivot_row;
    }
  }

  std::sort(active.begin(), active.end());
  QuadratureRule rule;
  rule.basis = basis.spec();
  rule.source_hash = samples.source_hash();
  rule.rng_seed = options.rng_seed;
  rule.deterministic = options.deterministic;
  for (std::size_t node : active) {
    if (weight[node] > kZeroWeight) {
      rule.node_indices.push_back(node);
      rule.weights.push_back(weight[node]);
    }
  }
  refine_weights(basis.rows_at(rule.node_indices, n), target, rule.weights);
  return rule;
}

RuleSequence build_sequence(const QuadratureRule& rule, const SampleSet& samples, std::uint64_t rng_seed) {
  if (rule.node_indices.empty()) throw Error(ErrorKind::Argument, "cannot build a sequence from an empty rule");
  if (rule.source_hash != samples.source_hash()) {
    throw Error(ErrorKind::Provenance, "rule was not built on this sample set");
  }
  const SampleBasis basis(samples.scaled(), rule.basis);
  const Eigen::VectorXd target = target_moments(basis, rule.basis.count);
  Rng rng(rng_seed);

  RuleSequence sequence;
  sequence.rules.push_back(rule);
  std::vector<std::size_t> nodes = rule.node_indices;
  std::vector<double> weights = rule.weights;
  while (nodes.size() > 1) {
    const std::size_t rows = std::min(nodes.size() - 1, rule.basis.count);
    const Elimination step =
        eliminate_node(nodes, weights, basis.rows_at(nodes, rows), draw_direction(rng, false));
    nodes = step.nodes;
    weights = step.weights;
    const std::size_t exact_rows = std::min(rows, rule.basis.count);
    refine_weights(basis.rows_at(nodes, exact_rows), target.head(static_cast<Eigen::Index>(exact_rows)), weights);

    QuadratureRule next = rule;
    next.node_indices = nodes;
    next.weights = weights;
    next.basis = rule.basis.prefix(std::min(nodes.size(), rule.basis.count));
    next.rng_seed = rng_seed;
    sequence.rules.push_back(std::move(next));
  }
  return sequence;
}

double apply_rule(const QuadratureRule& rule, const NodeValues& node_values) {
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.node_indices.size(); ++k) {
    const auto it = node_values.find(rule.node_indices[k]);
    if (it == node_values.end()) {
      throw Error(ErrorKind::IncompleteData, "no value for node " + std::to_string(rule.node_indices[k]));
    }
    sum += it->second * rule.weights[k];
  }
  return sum;
}

const QuadratureRule& member_with_nodes(const RuleSequence& sequence, std::size_t n) {
  for (const auto& r : sequence.rules) {
    if (r.size() <= n) return r;
  }
  throw Error(ErrorKind::Argument, "sequence has no rule with at most " + std::to_string(n) + " nodes");
}

double error_estimate(const std::vector<RuleSequence>& sequences, const NodeValues& node_values, std::size_t n) {
  if (sequences.empty()) throw Error(ErrorKind::Argument, "no sequences given");
  const QuadratureRule& full = sequences.front().rules.front();
  if (n >= full.size()) throw Error(ErrorKind::Argument, "n must be smaller than the full rule's node count");
  const double reference = apply_rule(full, node_values);
  double total = 0.0;
  for (const auto& s : sequences) {
    if (s.rules.empty() || s.rules.front().node_indices != full.node_indices) {
      throw Error(ErrorKind::Consistency, "sequences do not share the same full rule");
    }
    total += std::abs(apply_rule(member_with_nodes(s, n), node_values) - reference);
  }
  return total / static_cast<double>(sequences.size());
}

MomentCheck check_moments(const QuadratureRule& rule, const SampleSet& samples) {
  MomentCheck out;
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
  out.weight_sum_error = std::abs(w.sum() - 1.0);
  out.min_weight = w.size() ? w.minCoeff() : 0.0;

  const SampleBasis basis(samples.scaled(), rule.basis);
  const Eigen::VectorXd target = target_moments(basis, rule.basis.count);
  out.orthonormal = (basis.rows_at(rule.node_indices, rule.basis.count) * w - target).cwiseAbs().maxCoeff();

  Eigen::MatrixXd nodes(static_cast<Eigen::Index>(rule.size()), samples.scaled().cols());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    nodes.row(static_cast<Eigen::Index>(k)) = samples.scaled().row(static_cast<Eigen::Index>(rule.node_indices[k]));
  }
  const Eigen::VectorXd mono_target = vandermonde(samples.scaled(), rule.basis).rowwise().mean();
  out.monomial = (vandermonde(nodes, rule.basis) * w - mono_target).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace implquad
