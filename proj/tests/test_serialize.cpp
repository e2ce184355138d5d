#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "implquad/error.hpp"
#include "implquad/serialize.hpp"
#include "implquad/synth.hpp"

using namespace implquad;

namespace {

struct Fixture {
  SampleSet samples;
  QuadratureRule rule;
  EvaluationPlan plan;
  LoadResult result;
};

Fixture build() {
  SynthOptions so;
  so.rows = 600;
  SampleSet s = synthesize_environment(so);
  QuadratureRule rule = construct_implicit_rule(s, 21, {7, false});
  EvaluationPlan plan = make_plan(rule, balance_seeds(rule.weights, 0.4), s);
  LoadResult result = run_plan(plan, SurrogateModel(), {});
  return {std::move(s), std::move(rule), std::move(plan), std::move(result)};
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST(Serialize, RuleRoundTripIsByteIdentical) {
  const Fixture f = build();
  const Json j = rule_to_json(f.rule, f.samples);
  const RuleDocument doc = rule_from_json(Json::parse(dump(j)));
  ASSERT_TRUE(doc.rule.has_value());
  EXPECT_EQ(doc.rule->node_indices, f.rule.node_indices);
  EXPECT_EQ(doc.rule->weights, f.rule.weights);
  EXPECT_EQ(dump(rule_to_json(*doc.rule, f.samples)), dump(j));
  EXPECT_EQ(doc.nodes.weights, f.rule.weights);
  EXPECT_EQ(j.at("basis").at("count"), 21);
}

TEST(Serialize, PlanRoundTripIsByteIdentical) {
  const Fixture f = build();
  const Json j = plan_to_json(f.plan);
  const EvaluationPlan back = plan_from_json(Json::parse(dump(j)));
  EXPECT_EQ(back.total_seeds(), f.plan.total_seeds());
  EXPECT_EQ(dump(plan_to_json(back)), dump(j));
}

TEST(Serialize, ResultRoundTripIsByteIdentical) {
  const Fixture f = build();
  const Json j = load_result_to_json(f.result);
  const LoadResult back = load_result_from_json(Json::parse(dump(j)));
  EXPECT_EQ(back.aggregate, f.result.aggregate);
  EXPECT_EQ(back.per_node, f.result.per_node);
  EXPECT_EQ(dump(load_result_to_json(back)), dump(j));
}

TEST(Serialize, CsvShapes) {
  const Fixture f = build();
  const std::string csv = load_result_csv(f.result);
  EXPECT_EQ(count_lines(csv), 1 + f.result.slopes.size());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,rotating_hub_fx,blade_root_flap_moment,yaw_bearing_fx");

  GenzReport g;
  g.rows.push_back({GenzFamily::Gaussian, 2, 4, "implicit", 0.125});
  const std::string gcsv = genz_csv(g);
  EXPECT_EQ(gcsv, "family,B,N,method,mean_error\ngaussian,2,4,implicit,0.125\n");

  ConvergenceReport c;
  c.rows.push_back({"x", 3.0, 2, 0.5});
  c.trends.push_back({"x", 3.0, 0.5, 0.0, std::numeric_limits<double>::infinity(), 0.0, 1.0});
  EXPECT_EQ(count_lines(convergence_csv(c)), 2u);
  EXPECT_TRUE(convergence_to_json(c).at("trends")[0].at("decay_orders").is_null());
}

TEST(Serialize, DumpIsCanonical) {
  const Json j = {{"b", 1.0 / 3.0}, {"a", {1, 2}}};
  const std::string text = dump(j);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_LT(text.find("\"a\""), text.find("\"b\""));
  EXPECT_EQ(Json::parse(text).at("b").get<double>(), 1.0 / 3.0);
  EXPECT_EQ(payload_hash(j), sha256_hex(text));
}

TEST(Serialize, SchemaErrors) {
  EXPECT_THROW(rule_from_json(Json{{"provenance", "implicit"}}), Error);
  EXPECT_THROW(plan_from_json(Json::object()), Error);
  const auto path = std::filesystem::temp_directory_path() / "implquad_bad.json";
  write_text(path, "{not json");
  try {
    read_json(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
  std::filesystem::remove(path);
}

TEST(Serialize, ProvenanceMismatchIsRejected) {
  const Fixture f = build();
  QuadratureRule other = f.rule;
  other.source_hash = "0000";
  EXPECT_THROW(rule_to_json(other, f.samples), Error);
}
