#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "implquad/error.hpp"
#include "implquad/rainflow.hpp"
#include "implquad/random.hpp"
#include "test_support.hpp"

using namespace implquad;

namespace {

using fixture::Histogram;
using fixture::astm_three_point;

Histogram histogram(const std::vector<Cycle>& cycles) {
  Histogram h;
  for (const auto& c : cycles) h[c.range] += c.count;
  return h;
}

}  // namespace

TEST(Rainflow, StandardReferenceSequence) {
  const std::vector<double> series{-2, 1, -3, 5, -1, 3, -4, 4, -2};
  const Histogram expected{{3, 0.5}, {4, 1.5}, {6, 0.5}, {8, 1.0}, {9, 0.5}};
  EXPECT_EQ(astm_three_point(series), expected);
  EXPECT_EQ(histogram(rainflow_count(series)), expected);
}

TEST(Rainflow, AgreesWithTheThreePointOracleOnRandomSeries) {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> series(5 + trial % 80);
    // Integer levels make ties common, which stresses the <= comparisons.
    for (auto& x : series) x = std::floor(uniform(rng, -10.0, 10.0));
    EXPECT_EQ(histogram(rainflow_count(series)), astm_three_point(reversals(series))) << "trial " << trial;
  }
}

TEST(Rainflow, TwoPointSeries) {
  const auto cycles = rainflow_count({0.0, 10.0});
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0].range, 10.0);
  EXPECT_EQ(cycles[0].count, 0.5);
  EXPECT_EQ(cycles[0].mean, 5.0);
}

TEST(Rainflow, TriangleWave) {
  for (int periods : {1, 2, 5, 40}) {
    std::vector<double> series;
    for (int p = 0; p < periods; ++p) {
      for (int t = 0; t < 4; ++t) series.push_back(t <= 2 ? t : 4 - t);  // 0 1 2 1 | 0 ...
    }
    series.push_back(0.0);
    const auto cycles = rainflow_count(series);
    double count = 0.0;
    for (const auto& c : cycles) {
      EXPECT_EQ(c.range, 2.0);
      count += c.count;
    }
    EXPECT_EQ(count, periods);
  }
}

TEST(Rainflow, ReversalsAndDegenerateSeries) {
  EXPECT_EQ(reversals({0, 1, 1, 2, 3, 1, 1, 0, 4}), (std::vector<double>{0, 3, 0, 4}));
  EXPECT_TRUE(rainflow_count({}).empty());
  EXPECT_TRUE(rainflow_count({3.0}).empty());
  EXPECT_TRUE(rainflow_count({3.0, 3.0, 3.0}).empty());
  try {
    rainflow_count({0.0, NAN, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numeric);
  }
}

TEST(EquivalentLoad, ClosedForms) {
  for (double m : {1.0, 3.0, 10.0}) EXPECT_NEAR(equivalent_load({{7.0, 0.0, 1.0}}, m, 1.0), 7.0, 1e-12);
  EXPECT_NEAR(equivalent_load({{7.0, 0.0, 1.0}, {7.0, 0.0, 1.0}}, 2.0, 1.0), 7.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(equivalent_load({}, 3.0), 0.0);
  EXPECT_THROW(equivalent_load({{1.0, 0.0, 1.0}}, 0.5), Error);
  EXPECT_THROW(equivalent_load({{1.0, 0.0, 1.0}}, 3.0, 0.0), Error);
}

TEST(EquivalentLoad, MatchesBruteForceDamageSum) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Cycle> cycles;
    for (int i = 0; i < 30; ++i) cycles.push_back({uniform(rng, 0.0, 1e6), 0.0, i % 3 == 0 ? 0.5 : 1.0});
    for (double m : {2.0, 5.0, 12.0}) {
      long double damage = 0.0L, counted = 0.0L;
      for (const auto& c : cycles) {
        damage += c.count * std::pow(static_cast<long double>(c.range), m);
        counted += c.count;
      }
      const double expect = static_cast<double>(std::pow(damage / counted, 1.0L / m));
      EXPECT_NEAR(equivalent_load(cycles, m), expect, 1e-12 * expect);
      const double with_ref = static_cast<double>(std::pow(damage / 1e7L, 1.0L / m));
      EXPECT_NEAR(equivalent_load(cycles, m, 1e7), with_ref, 1e-12 * with_ref);
    }
  }
}
