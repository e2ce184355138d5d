#include "implquad/basis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "implquad/error.hpp"

namespace implquad {

namespace {

// All exponent tuples of one total degree, descending lexicographic.
void compositions(std::size_t dimension, int degree, std::size_t position, MultiIndex& current,
                  std::vector<MultiIndex>& out, std::size_t limit) {
  if (out.size() >= limit) return;
  if (position + 1 == dimension) {
    current[position] = degree;
    out.push_back(current);
    return;
  }
  for (int p = degree; p >= 0; --p) {
    current[position] = p;
    compositions(dimension, degree - p, position + 1, current, out, limit);
    if (out.size() >= limit) return;
  }
}

}  // namespace

int total_degree(const MultiIndex& index) {
  return std::accumulate(index.begin(), index.end(), 0);
}

std::vector<MultiIndex> multi_indices(std::size_t dimension, std::size_t count) {
  if (dimension == 0 || count == 0) {
    throw Error(ErrorKind::Argument, "multi_indices requires dimension >= 1 and count >= 1");
  }
  std::vector<MultiIndex> out;
  out.reserve(count);
  MultiIndex current(dimension, 0);
  for (int degree = 0; out.size() < count; ++degree) {
    compositions(dimension, degree, 0, current, out, count);
  }
  return out;
}

BasisSpec BasisSpec::graded_lex(std::size_t dimension, std::size_t count) {
  return BasisSpec{dimension, count, multi_indices(dimension, count)};
}

BasisSpec BasisSpec::prefix(std::size_t n) const {
  if (n == 0 || n > count) {
    throw Error(ErrorKind::Argument, "basis prefix length out of range");
  }
  BasisSpec out{dimension, n, {}};
  out.indices.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> BasisSpec::parents() const {
  std::map<MultiIndex, std::size_t> position;
  for (std::size_t j = 0; j < indices.size(); ++j) position.emplace(indices[j], j);
  std::vector<std::pair<std::size_t, std::size_t>> out(indices.size(), {0, 0});
  for (std::size_t j = 1; j < indices.size(); ++j) {
    MultiIndex parent = indices[j];
    // Peel off the last coordinate with a positive exponent.
    std::size_t axis = dimension;
    while (axis > 0 && parent[axis - 1] == 0) --axis;
    --axis;
    parent[axis] -= 1;
    // Graded-lex prefixes are closed under lowering an exponent.
    out[j] = {position.at(parent), axis};
  }
  return out;
}

Eigen::MatrixXd vandermonde(const Eigen::MatrixXd& points, const BasisSpec& spec) {
  const auto m = points.rows();
  Eigen::MatrixXd v(static_cast<Eigen::Index>(spec.count), m);
  if (spec.count == 0) return v;
  v.row(0).setOnes();
  const auto parents = spec.parents();
  for (std::size_t j = 1; j < spec.count; ++j) {
    const auto [p, axis] = parents[j];
    v.row(static_cast<Eigen::Index>(j)) =
        v.row(static_cast<Eigen::Index>(p)).cwiseProduct(points.col(static_cast<Eigen::Index>(axis)).transpose());
  }
  return v;
}

SampleBasis::SampleBasis(const Eigen::MatrixXd& scaled, BasisSpec spec) : spec_(std::move(spec)) {
  const Eigen::Index k = scaled.rows();
  const auto n = static_cast<Eigen::Index>(spec_.count);
  if (k == 0) throw Error(ErrorKind::EmptyData, "cannot build a basis on zero samples");
  if (n > k) {
    throw RankDeficiencyError(spec_.count, "basis of size " + std::to_string(spec_.count) +
                                               " exceeds the sample count " + std::to_string(k));
  }
  // Orthonormal in the plain Euclidean sense first (Q), rescaled by sqrt(K) at the end.
  Eigen::MatrixXd q(k, n);
  residual_norms_.resize(n);
  q.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
  residual_norms_(0) = 1.0;
  const auto parents = spec_.parents();
  for (Eigen::Index j = 1; j < n; ++j) {
    const auto [p, axis] = parents[static_cast<std::size_t>(j)];
    Eigen::VectorXd v = q.col(static_cast<Eigen::Index>(p)).cwiseProduct(scaled.col(static_cast<Eigen::Index>(axis)));
    const double before = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd h = q.leftCols(j).transpose() * v;
      v.noalias() -= q.leftCols(j) * h;
    }
    const double after = v.norm();
    const double relative = before > 0.0 ? after / before : 0.0;
    residual_norms_(j) = relative;
    if (!(relative > kRankTolerance)) {
      throw RankDeficiencyError(static_cast<std::size_t>(j + 1),
                                "basis loses full row rank on the samples at basis size " +
                                    std::to_string(j + 1));
    }
    q.col(j) = v / after;
  }
  values_ = std::sqrt(static_cast<double>(k)) * q;
}

Eigen::MatrixXd SampleBasis::rows_at(const std::vector<std::size_t>& nodes, std::size_t rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) =
        values_.row(static_cast<Eigen::Index>(nodes[c])).head(static_cast<Eigen::Index>(rows)).transpose();
  }
  return out;
}

double monomial_condition_number(const Eigen::MatrixXd& points, const BasisSpec& spec) {
  const Eigen::MatrixXd v = vandermonde(points, spec) / std::sqrt(static_cast<double>(points.rows()));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(v.transpose());
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smallest = s(s.size() - 1);
  if (smallest <= 0.0 || s.size() < static_cast<Eigen::Index>(spec.count)) {
    return std::numeric_limits<double>::infinity();
  }
  return s(0) / smallest;
}

}  // namespace implquad
