#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace implquad {

using MultiIndex = std::vector<int>;

// Ordering of the monomial basis: total degree ascending; within one total
// degree, exponent tuples in descending lexicographic order, so the first
// coordinate's power falls first. For d = 2 this gives
// 1, x, y, x^2, xy, y^2, x^3, ...
inline constexpr std::string_view kOrderingRule =
    "graded-lex: total degree ascending, ties by descending lexicographic exponent tuple";

std::vector<MultiIndex> multi_indices(std::size_t dimension, std::size_t count);

int total_degree(const MultiIndex& index);

struct BasisSpec {
  std::size_t dimension = 0;
  std::size_t count = 0;
  std::vector<MultiIndex> indices;

  static BasisSpec graded_lex(std::size_t dimension, std::size_t count);

  // Paper convention: a rule integrating `count` basis functions has degree count - 1.
  std::size_t degree() const { return count == 0 ? 0 : count - 1; }
  // For each j > 0: the earlier index p and coordinate i with indices[j] = indices[p] + e_i.
  std::vector<std::pair<std::size_t, std::size_t>> parents() const;
  BasisSpec prefix(std::size_t n) const;
};

// (count x m) matrix with entry (j, k) = phi_j(points.row(k)). Points are rows.
Eigen::MatrixXd vandermonde(const Eigen::MatrixXd& points, const BasisSpec& spec);

// Basis functions orthonormalised against the empirical measure of a sample set.
//
// Columns are built Arnoldi-style: column j is x_i * column(parent(j)),
// orthogonalised twice against all previous columns. The span of the first n
// columns equals the span of the first n monomials (the change of basis is
// triangular), so the moment equations and their null space are unchanged
// while the conditioning is that of an orthonormal system. Values are scaled so
// that (1/K) sum_k psi_i(y_k) psi_j(y_k) = delta_ij and psi_0 = 1, which makes
// the empirical moment vector e_0.
class SampleBasis {
 public:
  // `scaled` is K x d with rows in [0,1]^d. Throws RankDeficiencyError naming
  // the first basis size at which the basis loses full rank on the samples.
  SampleBasis(const Eigen::MatrixXd& scaled, BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  std::size_t sample_count() const { return static_cast<std::size_t>(values_.rows()); }
  // K x count; row k holds psi_0..psi_{count-1} at sample k.
  const Eigen::MatrixXd& values() const { return values_; }
  // Relative norm of each column before normalisation; the smallest entry is
  // a cheap degeneracy indicator.
  const Eigen::VectorXd& residual_norms() const { return residual_norms_; }

  // (rows x nodes) system restricted to the given sample indices.
  Eigen::MatrixXd rows_at(const std::vector<std::size_t>& nodes, std::size_t rows) const;

 private:
  BasisSpec spec_;
  Eigen::MatrixXd values_;
  Eigen::VectorXd residual_norms_;
};

inline constexpr double kRankTolerance = 1e-12;

// 2-norm condition number of the raw monomial Vandermonde matrix on the given
// points (scaled by 1/sqrt(m)). Returns +inf for rank-deficient systems.
double monomial_condition_number(const Eigen::MatrixXd& points, const BasisSpec& spec);

}  // namespace implquad
