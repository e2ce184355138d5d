#include <gtest/gtest.h>

#include <cmath>

#include "implquad/bench.hpp"
#include "implquad/error.hpp"
#include "implquad/seedbalance.hpp"
#include "test_support.hpp"

using namespace implquad;

namespace {

GenzFunction make(GenzFamily family, Eigen::VectorXd a, Eigen::VectorXd b) { return {family, std::move(a), std::move(b)}; }

class ConstantModel : public Model {
 public:
  std::string id() const override { return "constant"; }
  std::vector<std::string> components() const override { return {"k"}; }
  ModelOutput evaluate(const PlanEntry&, std::uint64_t, const std::vector<double>& slopes) const override {
    return {{std::vector<double>(slopes.size(), 7.0)}, {}};
  }
};

class LinearModel : public Model {
 public:
  std::string id() const override { return "linear"; }
  std::vector<std::string> components() const override { return {"v"}; }
  ModelOutput evaluate(const PlanEntry& e, std::uint64_t, const std::vector<double>& slopes) const override {
    return {{std::vector<double>(slopes.size(), 1.0 + e.coords_raw[0])}, {}};
  }
};

}  // namespace

TEST(Genz, TrivialValues) {
  const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(3);
  const Eigen::VectorXd b = Eigen::Vector3d(0.2, 0.4, 0.7);
  const Eigen::VectorXd a = Eigen::Vector3d(1.0, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::Oscillatory, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)),
                                 Eigen::RowVectorXd::Constant(3, 0.3)),
                   1.0);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::CornerPeak, a, b), zero), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::Gaussian, a, b), b.transpose()), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::C0, a, b), b.transpose()), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::ProductPeak, a, b), b.transpose()), 1.0 * 4.0 * 0.25);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::Discontinuous, a, b), Eigen::RowVector3d(0.5, 0.1, 0.1)), 0.0);
  EXPECT_DOUBLE_EQ(evaluate_genz(make(GenzFamily::Discontinuous, a, b), zero), 1.0);
  // Corner peak along the diagonal: (1 + t sum a)^-(d+1).
  EXPECT_NEAR(evaluate_genz(make(GenzFamily::CornerPeak, a, b), Eigen::RowVectorXd::Constant(3, 0.5)),
              std::pow(1.0 + 0.5 * 3.5, -4.0), 1e-15);
}

TEST(Genz, RandomParametersHaveFixedDifficulty) {
  Rng rng(3);
  for (GenzFamily f : kAllGenzFamilies) {
    const GenzFunction g = random_genz(f, 5, rng);
    EXPECT_NEAR(g.a.norm(), 2.5, 1e-14);
    EXPECT_TRUE((g.b.array() >= 0.0).all() && (g.b.array() < 1.0).all());
    EXPECT_TRUE((g.a.array() >= 0.0).all());
  }
}

TEST(Genz, FamilyNamesRoundTrip) {
  for (GenzFamily f : kAllGenzFamilies) EXPECT_EQ(family_from_name(family_name(f)), f);
  EXPECT_THROW(family_from_name("peaky"), Error);
}

TEST(GenzExperiment, SingleBinMatchesDirectComputation) {
  const SampleSet s = fixture::random_cloud(300, 2, 8);
  GenzOptions opts;
  opts.bin_counts = {1};
  opts.repetitions = 4;
  opts.seed = 11;
  const GenzReport report = run_genz_experiment(s, opts);
  const QuadratureRule one = construct_implicit_rule(s, 1, {derive_seed(11, 1), false});
  ASSERT_EQ(one.size(), 1u);
  for (GenzFamily f : kAllGenzFamilies) {
    double bin_err = 0.0, imp_err = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      Rng rng(derive_seed(derive_seed(11, "genz"), r * 16 + static_cast<std::size_t>(f)));
      const GenzFunction g = random_genz(f, 2, rng);
      long double mean = 0.0L;
      for (Eigen::Index i = 0; i < s.scaled().rows(); ++i) mean += evaluate_genz(g, s.scaled().row(i));
      mean /= s.size();
      bin_err += std::abs(evaluate_genz(g, Eigen::RowVector2d(0.5, 0.5)) - static_cast<double>(mean));
      imp_err += std::abs(evaluate_genz(g, s.scaled().row(static_cast<Eigen::Index>(one.node_indices[0]))) -
                          static_cast<double>(mean));
    }
    const GenzRow* b = report.find(f, 1, "binning");
    const GenzRow* i = report.find(f, 1, "implicit");
    ASSERT_NE(b, nullptr);
    ASSERT_NE(i, nullptr);
    EXPECT_NEAR(b->mean_error, bin_err / 4, 1e-14);
    EXPECT_NEAR(i->mean_error, imp_err / 4, 1e-14);
    EXPECT_EQ(b->nodes, 1u);
  }
}

TEST(GenzExperiment, Deterministic) {
  const SampleSet s = fixture::random_cloud(40, 2, 2);
  GenzOptions opts;
  opts.bin_counts = {2, 9};
  opts.repetitions = 3;
  const GenzReport a = run_genz_experiment(s, opts);
  const GenzReport b = run_genz_experiment(s, opts);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].mean_error, b.rows[i].mean_error);
  // Occupied cells never outnumber the samples.
  for (const auto& r : a.rows) EXPECT_LE(r.nodes, s.size());
  opts.repetitions = 0;
  EXPECT_THROW(run_genz_experiment(s, opts), Error);
}

TEST(Convergence, CurveMatchesDirectSummation) {
  const SampleSet s = fixture::random_cloud(200, 2, 5);
  const QuadratureRule rule = construct_implicit_rule(s, 10, {1, false});
  const std::vector<RuleSequence> seqs{build_sequence(rule, s, 1), build_sequence(rule, s, 2)};
  NodeValues u;
  for (std::size_t k : rule.node_indices) u[k] = 1.0 + s.raw()(static_cast<Eigen::Index>(k), 0);
  const double m = 3.0;
  double ref = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) ref += rule.weights[j] * std::pow(u[rule.node_indices[j]], m);
  ref = std::cbrt(ref);
  const auto curve = relative_error_curve(seqs, u, ref, m);
  ASSERT_EQ(curve.size(), rule.size() - 1);
  for (const auto& p : curve) {
    double total = 0.0;
    for (const auto& seq : seqs) {
      const QuadratureRule& r = member_with_nodes(seq, p.nodes);
      double acc = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) acc += r.weights[j] * std::pow(u[r.node_indices[j]], m);
      total += std::abs(std::cbrt(acc) - ref) / ref;
    }
    EXPECT_NEAR(p.relative_error, total / 2, 1e-13);
  }
  EXPECT_THROW(relative_error_curve(seqs, u, 0.0, m), Error);
}

TEST(Convergence, ReportShapeAndConstantModel) {
  const SampleSet cloud = fixture::random_cloud(150, 2, 6);
  const SampleSet s(cloud.raw() * 20.0, {"v_hub", "theta_wind"}, "cloud");
  const QuadratureRule rule = construct_implicit_rule(s, 6, {2, false});
  const EvaluationPlan plan = make_plan(rule, uniform_seeds(rule.size(), 1), s);
  RunOptions opts;
  opts.slopes = {3, 5};
  const std::vector<RuleSequence> seqs{build_sequence(rule, s, 3)};
  const ConvergenceReport flat = convergence_report(seqs, run_plan(plan, ConstantModel(), opts));
  EXPECT_EQ(flat.rows.size(), (rule.size() - 1) * 2);
  EXPECT_EQ(flat.trends.size(), 2u);
  for (const auto& r : flat.rows) EXPECT_NEAR(r.relative_error, 0.0, 1e-14);

  const ConvergenceReport lin = convergence_report(seqs, run_plan(plan, LinearModel(), opts));
  for (const auto& t : lin.trends) {
    EXPECT_GT(t.first_error, 0.0);
    EXPECT_GE(t.monotone_fraction, 0.0);
    EXPECT_LE(t.monotone_fraction, 1.0);
  }

  LoadResult no_index = run_plan(plan, ConstantModel(), opts);
  no_index.sample_indices[0].reset();
  try {
    convergence_report(seqs, no_index);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Consistency);
  }
}
