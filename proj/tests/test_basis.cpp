#include <gtest/gtest.h>

#include <algorithm>

#include "implquad/basis.hpp"
#include "implquad/error.hpp"
#include "test_support.hpp"

using namespace implquad;

namespace {

// All exponent tuples of total degree <= max_degree, sorted by degree and then
// descending lexicographic order.
std::vector<MultiIndex> enumerate_sorted(std::size_t d, int max_degree) {
  std::vector<MultiIndex> all;
  MultiIndex cur(d, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos == d) {
      all.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[pos] = e;
      rec(pos + 1, left - e);
    }
    cur[pos] = 0;
  };
  rec(0, max_degree);
  std::sort(all.begin(), all.end(), [](const MultiIndex& a, const MultiIndex& b) {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a > b;
  });
  return all;
}

}  // namespace

TEST(MultiIndices, UnivariatePowers) {
  EXPECT_EQ(multi_indices(1, 3), (std::vector<MultiIndex>{{0}, {1}, {2}}));
}

TEST(MultiIndices, TwoDimensionalTieRule) {
  EXPECT_EQ(multi_indices(2, 4), (std::vector<MultiIndex>{{0, 0}, {1, 0}, {0, 1}, {2, 0}}));
  EXPECT_EQ(multi_indices(2, 6), (std::vector<MultiIndex>{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}));
}

TEST(MultiIndices, MatchesSortedEnumeration) {
  for (std::size_t d = 1; d <= 5; ++d) {
    const auto oracle = enumerate_sorted(d, 6);
    const std::size_t n = std::min<std::size_t>(oracle.size(), 120);
    const auto got = multi_indices(d, n);
    ASSERT_EQ(got.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(got[i], oracle[i]) << "d=" << d << " i=" << i;
  }
}

TEST(MultiIndices, PrefixClosedAndStartsAtZero) {
  for (std::size_t d = 1; d <= 4; ++d) {
    const auto big = multi_indices(d, 70);
    EXPECT_EQ(big.front(), MultiIndex(d, 0));
    for (std::size_t n = 1; n < 70; n += 7) {
      const auto small = multi_indices(d, n);
      EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin()));
    }
    for (std::size_t i = 1; i < big.size(); ++i) EXPECT_LE(total_degree(big[i - 1]), total_degree(big[i]));
  }
}

TEST(MultiIndices, WindSpeedCubedTimesDirectionToTheSeventh) {
  const auto indices = multi_indices(5, 3003);  // every index up to degree 10 in 5D
  const MultiIndex target{3, 7, 0, 0, 0};
  const auto it = std::find(indices.begin(), indices.end(), target);
  ASSERT_NE(it, indices.end());
  EXPECT_EQ(total_degree(*it), 10);
}

TEST(BasisSpec, DegreeConventionAndParents) {
  const auto spec = BasisSpec::graded_lex(3, 20);
  EXPECT_EQ(spec.degree(), 19u);
  const auto parents = spec.parents();
  ASSERT_EQ(parents.size(), spec.count);
  for (std::size_t j = 1; j < spec.count; ++j) {
    auto [p, axis] = parents[j];
    ASSERT_LT(p, j);
    MultiIndex expect = spec.indices[p];
    expect[axis] += 1;
    EXPECT_EQ(expect, spec.indices[j]);
  }
  EXPECT_EQ(spec.prefix(5).indices, multi_indices(3, 5));
}

TEST(Vandermonde, HandValues) {
  Eigen::MatrixXd x(1, 1);
  x << 0.5;
  const Eigen::MatrixXd v = vandermonde(x, BasisSpec::graded_lex(1, 3));
  EXPECT_DOUBLE_EQ(v(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(v(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(v(2, 0), 0.25);

  Eigen::MatrixXd y(1, 2);
  y << 0.2, 0.3;
  const auto spec = BasisSpec::graded_lex(2, 6);
  const Eigen::MatrixXd w = vandermonde(y, spec);
  const auto pos = std::find(spec.indices.begin(), spec.indices.end(), MultiIndex{1, 1}) - spec.indices.begin();
  EXPECT_NEAR(w(pos, 0), 0.06, 1e-15);
}

TEST(Vandermonde, RowZeroOnesPrefixAndOrigin) {
  const auto samples = fixture::random_cloud(30, 3, 11);
  const auto big = BasisSpec::graded_lex(3, 35);
  const Eigen::MatrixXd vb = vandermonde(samples.scaled(), big);
  EXPECT_TRUE((vb.row(0).array() == 1.0).all());
  for (std::size_t n : {1u, 4u, 10u, 20u}) {
    const Eigen::MatrixXd vs = vandermonde(samples.scaled(), big.prefix(n));
    EXPECT_EQ(vs, vb.topRows(static_cast<Eigen::Index>(n)));
  }
  for (Eigen::Index j = 0; j < vb.rows(); ++j) {
    for (Eigen::Index k = 0; k < vb.cols(); ++k) {
      EXPECT_NEAR(vb(j, k), fixture::monomial(samples.scaled().row(k), big.indices[static_cast<std::size_t>(j)]), 1e-14);
    }
  }
  Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(1, 3);
  const Eigen::MatrixXd vo = vandermonde(origin, big);
  EXPECT_EQ(vo(0, 0), 1.0);
  EXPECT_TRUE((vo.bottomRows(vo.rows() - 1).array() == 0.0).all());
}

TEST(SampleBasis, OrthonormalUnderEmpiricalMeasure) {
  const auto samples = fixture::random_cloud(400, 3, 2);
  const SampleBasis basis(samples.scaled(), BasisSpec::graded_lex(3, 30));
  const Eigen::MatrixXd& psi = basis.values();
  const double k = static_cast<double>(psi.rows());
  const Eigen::MatrixXd gram = psi.transpose() * psi / k;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((psi.col(0).array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(SampleBasis, SpansTheMonomialPrefixes) {
  const auto samples = fixture::random_cloud(300, 2, 4);
  const auto spec = BasisSpec::graded_lex(2, 21);
  const SampleBasis basis(samples.scaled(), spec);
  const Eigen::MatrixXd v = vandermonde(samples.scaled(), spec).transpose();  // K x count
  for (Eigen::Index n = 1; n <= 21; ++n) {
    const Eigen::MatrixXd q = basis.values().leftCols(n);
    const Eigen::MatrixXd coef = q.colPivHouseholderQr().solve(v.leftCols(n));
    EXPECT_LT((q * coef - v.leftCols(n)).norm() / v.leftCols(n).norm(), 1e-9) << "prefix " << n;
  }
}

TEST(SampleBasis, RankDeficiencyNamesTheBasisSize) {
  // Two distinct points support only two independent functions.
  const auto samples = fixture::one_dimensional({0.0, 0.0, 1.0, 1.0});
  try {
    SampleBasis basis(samples.scaled(), BasisSpec::graded_lex(1, 3));
    FAIL() << "expected a rank deficiency";
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.basis_count(), 3u);
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficiency);
  }
  EXPECT_THROW(SampleBasis(fixture::one_dimensional({0.0, 1.0}).scaled(), BasisSpec::graded_lex(1, 3)),
               RankDeficiencyError);
}

TEST(SampleBasis, ConditionTelemetryGrowsWithDegree) {
  const auto samples = fixture::random_cloud(500, 2, 9);
  const double low = monomial_condition_number(samples.scaled(), BasisSpec::graded_lex(2, 6));
  const double high = monomial_condition_number(samples.scaled(), BasisSpec::graded_lex(2, 28));
  EXPECT_GT(low, 1.0);
  EXPECT_GT(high, low);
}
