#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "implquad/error.hpp"
#include "implquad/model.hpp"
#include "implquad/rainflow.hpp"
#include "implquad/synth.hpp"

using namespace implquad;

namespace {

const std::vector<double> kSlopes{3, 5, 10};

class ConstantModel : public Model {
 public:
  std::string id() const override { return "constant"; }
  std::vector<std::string> components() const override { return {"a", "b"}; }
  ModelOutput evaluate(const PlanEntry&, std::uint64_t, const std::vector<double>& slopes) const override {
    return {std::vector<std::vector<double>>(2, std::vector<double>(slopes.size(), 3.0)), {}};
  }
};

// Returns the seed id itself so seed averaging can be checked exactly.
class SeedModel : public Model {
 public:
  std::string id() const override { return "seed"; }
  std::vector<std::string> components() const override { return {"s"}; }
  ModelOutput evaluate(const PlanEntry&, std::uint64_t seed, const std::vector<double>& slopes) const override {
    return {{std::vector<double>(slopes.size(), static_cast<double>(seed))}, {}};
  }
};

class FailingModel : public Model {
 public:
  std::string id() const override { return "failing"; }
  std::vector<std::string> components() const override { return {"x"}; }
  ModelOutput evaluate(const PlanEntry& e, std::uint64_t seed, const std::vector<double>& slopes) const override {
    if (e.node == 1 && seed == 2) throw std::runtime_error("solver diverged");
    return {{std::vector<double>(slopes.size(), 1.0)}, {}};
  }
};

EvaluationPlan small_plan(std::vector<unsigned> seeds) {
  WeightedNodes nodes;
  nodes.coords_raw.resize(3, 2);
  nodes.coords_raw << 5.0, 0.0, 11.0, 4.0, 20.0, -6.0;
  nodes.weights = {0.5, 0.3, 0.2};
  nodes.sample_indices = {0, 1, 2};
  nodes.provenance = "sample";
  SeedAllocation alloc;
  alloc.seeds = std::move(seeds);
  for (unsigned s : alloc.seeds) alloc.total += s;
  return make_plan(nodes, alloc, {"v_hub", "theta_wind"}, "h");
}

}  // namespace

TEST(Surrogate, NoiseFreeIsSeedIndependent) {
  SurrogateModel model({0.0});
  const EnvironmentPoint p{11.0, 3.0, 1.5, 7.0, 10.0};
  const auto a = model.loads(p, 1, kSlopes);
  const auto b = model.loads(p, 99, kSlopes);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, model.mean_loads(p, kSlopes));
  EXPECT_EQ(model.components().size(), 3u);
}

TEST(Surrogate, SeedMeanConvergesToNoiseFreeLoad) {
  const double noise = 0.05;
  SurrogateModel model({noise});
  const EnvironmentPoint p{9.0, 0.0, 1.46, 6.76, -2.11};
  const auto truth = model.mean_loads(p, {5.0});
  const int n = 10000;
  std::vector<double> sum(3, 0.0);
  for (int s = 1; s <= n; ++s) {
    const auto l = model.loads(p, s, {5.0});
    for (int c = 0; c < 3; ++c) sum[c] += l[c][0];
  }
  const double sd = std::sqrt(std::exp(noise * noise) - 1.0);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(sum[c] / n / truth[c][0], 1.0, 3.0 * sd / std::sqrt(n));
}

TEST(Surrogate, SmoothAcrossWindSpeed) {
  SurrogateModel model({0.0});
  for (double v = 3.0; v <= 25.0; v += 0.25) {
    const double h = 1e-4;
    const auto lo = model.mean_loads({v - h, 0, 1.46, 6.76, 0}, {5.0});
    const auto hi = model.mean_loads({v + h, 0, 1.46, 6.76, 0}, {5.0});
    for (int c = 0; c < 3; ++c) {
      const double d = (hi[c][0] - lo[c][0]) / (2 * h) / lo[c][0];
      EXPECT_TRUE(std::isfinite(d));
      EXPECT_LT(std::abs(d), 1.0);
    }
  }
}

TEST(Surrogate, SeriesModeMatchesRainflowOfTheSeries) {
  SurrogateOptions opts;
  opts.emit_series = true;
  SurrogateModel model(opts);
  const EvaluationPlan plan = small_plan({2, 1, 1});
  const ModelOutput out = model.evaluate(plan.entries[0], 1, kSlopes);
  ASSERT_EQ(out.series.size(), 3u);
  RunOptions run;
  run.slopes = kSlopes;
  const LoadResult r = run_plan(plan, model, run);
  double first = 0.0;
  for (std::uint64_t s = 1; s <= 2; ++s) {
    first += equivalent_load(rainflow_count(model.evaluate(plan.entries[0], s, kSlopes).series[0]), 3.0);
  }
  EXPECT_NEAR(r.per_node[0][0][0], first / 2, 1e-12 * first);
}

TEST(RunPlan, ConstantModelAggregatesToTheConstant) {
  RunOptions opts;
  opts.slopes = kSlopes;
  const LoadResult r = run_plan(small_plan({5, 5, 5}), ConstantModel(), opts);
  for (const auto& row : r.aggregate) {
    for (double v : row) EXPECT_NEAR(v, 3.0, 1e-14);
  }
  EXPECT_EQ(r.components, (std::vector<std::string>{"a", "b"}));
}

TEST(RunPlan, SeedIdsRunFromOne) {
  const LoadResult r = run_plan(small_plan({3, 1, 4}), SeedModel(), {});
  EXPECT_EQ(r.per_node[0][0][0], 2.0);
  EXPECT_EQ(r.per_node[1][0][0], 1.0);
  EXPECT_EQ(r.per_node[2][0][0], 2.5);
  EXPECT_EQ(r.seed_spread[1][0][0], 0.0);
  EXPECT_NEAR(r.seed_spread[0][0][0], 1.0, 1e-15);
  EXPECT_EQ(r.seed_counts, (std::vector<unsigned>{3, 1, 4}));
}

TEST(RunPlan, OnlyZeroWeightEntriesMayHaveNoSeeds) {
  EvaluationPlan plan = small_plan({2, 0, 2});
  try {
    run_plan(plan, SeedModel(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Consistency);
  }
  plan.entries[0].weight = 0.8;
  plan.entries[1].weight = 0.0;
  const LoadResult r = run_plan(plan, SeedModel(), {});
  EXPECT_EQ(r.nodes, (std::vector<std::size_t>{0, 2}));
  EXPECT_THROW(run_plan(small_plan({0, 0, 0}), SeedModel(), {}), Error);
}

TEST(RunPlan, AggregateMatchesHandComputation) {
  SurrogateModel model;
  const EvaluationPlan plan = small_plan({2, 3, 1});
  RunOptions opts;
  opts.slopes = kSlopes;
  const LoadResult r = run_plan(plan, model, opts);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t s = 0; s < kSlopes.size(); ++s) {
      const double m = kSlopes[s];
      double acc = 0.0;
      for (std::size_t e = 0; e < 3; ++e) {
        double mean = 0.0;
        for (unsigned k = 1; k <= plan.entries[e].seed_count; ++k) {
          mean += model.loads(plan.entries[e].environment, k, kSlopes)[c][s];
        }
        mean /= plan.entries[e].seed_count;
        acc += plan.entries[e].weight * std::pow(mean, m);
      }
      EXPECT_NEAR(r.aggregate[c][s], std::pow(acc, 1.0 / m), 1e-12 * r.aggregate[c][s]);
    }
  }
  EXPECT_EQ(r.reaggregate(), r.aggregate);
}

TEST(RunPlan, ParallelMatchesSequential) {
  SynthOptions so;
  so.rows = 400;
  const SampleSet s = synthesize_environment(so);
  WeightedNodes nodes;
  nodes.coords_raw = s.raw().topRows(40);
  nodes.weights.assign(40, 1.0 / 40);
  for (std::size_t i = 0; i < 40; ++i) nodes.sample_indices.push_back(i);
  nodes.provenance = "sample";
  const EvaluationPlan plan = make_plan(nodes, uniform_seeds(40, 3), s.column_names(), s.source_hash());
  RunOptions seq;
  RunOptions par;
  par.parallel = 4;
  const LoadResult a = run_plan(plan, SurrogateModel(), seq);
  const LoadResult b = run_plan(plan, SurrogateModel(), par);
  EXPECT_EQ(a.per_node, b.per_node);
  EXPECT_EQ(a.aggregate, b.aggregate);
}

TEST(RunPlan, FailuresNameEntryAndSeed) {
  try {
    run_plan(small_plan({2, 2, 2}), FailingModel(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PlanExecution);
    EXPECT_NE(std::string(e.what()).find("entry 1, seed 2"), std::string::npos);
  }
  RunOptions bad;
  bad.slopes = {0.5};
  EXPECT_THROW(run_plan(small_plan({1, 1, 1}), ConstantModel(), bad), Error);
}

TEST(CommandModel, RoundTripsThroughAShellCommand) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "implquad_cmd_test";
  fs::create_directories(dir);
  const fs::path script = dir / "model.py";
  {
    std::ofstream f(script);
    f << "import json, sys\n"
         "req = json.load(open(sys.argv[1]))\n"
         "v = req['environment']['v_hub'] + req['seed_id']\n"
         "json.dump({'equivalent_loads': {'q': [v * m for m in req['slopes']]}}, open(sys.argv[2], 'w'))\n";
  }
  CommandModel model("python3 " + script.string() + " {input_json} {output_json}", {"q"}, (dir / "work").string());
  RunOptions opts;
  opts.slopes = {2.0, 4.0};
  const LoadResult r = run_plan(small_plan({1, 2, 1}), model, opts);
  EXPECT_NEAR(r.per_node[0][0][0], (5.0 + 1.0) * 2.0, 1e-12);
  EXPECT_NEAR(r.per_node[1][0][1], (11.0 + 1.5) * 4.0, 1e-12);

  CommandModel broken("false {input_json} {output_json}", {"q"}, (dir / "work").string());
  EXPECT_THROW(run_plan(small_plan({1, 1, 1}), broken, opts), Error);
  EXPECT_THROW(CommandModel("echo {input_json}", {"q"}), Error);
  fs::remove_all(dir);
}
