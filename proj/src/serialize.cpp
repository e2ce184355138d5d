#include "implquad/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "implquad/error.hpp"

namespace implquad {
namespace {

constexpr int kFormatVersion = 1;

Json scaling_json(const std::vector<ColumnScaling>& scaling) {
  Json out = Json::array();
  for (const auto& s : scaling) out.push_back({{"lo", s.lo}, {"hi", s.hi}});
  return out;
}

std::vector<ColumnScaling> scaling_from(const Json& j) {
  std::vector<ColumnScaling> out;
  for (const auto& s : j) out.push_back({s.at("lo").get<double>(), s.at("hi").get<double>()});
  return out;
}

std::vector<double> row_vector(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

// Infinite values are not representable in JSON; they are written as null.
Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("malformed ") + what + ": " + e.what());
  }
}

Json environment_json(const EnvironmentPoint& p) {
  return {{"v_hub", p.v_hub}, {"theta_wind", p.theta_wind}, {"h_s", p.h_s}, {"t_p", p.t_p},
          {"misalignment", p.misalignment}};
}

EnvironmentPoint environment_from_json(const Json& j) {
  EnvironmentPoint p;
  p.v_hub = j.at("v_hub").get<double>();
  p.theta_wind = j.at("theta_wind").get<double>();
  p.h_s = j.at("h_s").get<double>();
  p.t_p = j.at("t_p").get<double>();
  p.misalignment = j.at("misalignment").get<double>();
  return p;
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Json rule_to_json(const QuadratureRule& rule, const SampleSet& samples) {
  if (rule.source_hash != samples.source_hash()) {
    throw Error(ErrorKind::Provenance, "rule and sample set have different source hashes");
  }
  Json nodes = Json::array();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(rule.node_indices[i]);
    nodes.push_back({{"index", rule.node_indices[i]},
                     {"coords_raw", row_vector(samples.raw(), k)},
                     {"coords_scaled", row_vector(samples.scaled(), k)},
                     {"weight", rule.weights[i]}});
  }
  return {{"format_version", kFormatVersion},
          {"provenance", "implicit"},
          {"basis", {{"dimension", rule.basis.dimension}, {"count", rule.basis.count},
                     {"ordering_rule", std::string(kOrderingRule)}}},
          {"columns", samples.column_names()},
          {"scaling", scaling_json(samples.scaling())},
          {"nodes", nodes},
          {"source_hash", rule.source_hash},
          {"rng_seed", rule.rng_seed},
          {"deterministic", rule.deterministic}};
}

Json binning_to_json(const BinGrid& grid, const WeightedNodes& nodes, const SampleSet& samples) {
  const Eigen::MatrixXd scaled = scale(nodes.coords_raw, samples.scaling());
  Json out_nodes = Json::array();
  for (std::size_t i = 0; i < nodes.weights.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out_nodes.push_back({{"index", nullptr},
                         {"bin", grid.cells[i]},
                         {"members", grid.counts[i]},
                         {"coords_raw", row_vector(nodes.coords_raw, r)},
                         {"coords_scaled", row_vector(scaled, r)},
                         {"weight", nodes.weights[i]}});
  }
  return {{"format_version", kFormatVersion},
          {"provenance", "binning"},
          {"node_kind", nodes.provenance},
          {"basis", {{"dimension", samples.dimension()}, {"count", 1},
                     {"ordering_rule", std::string(kOrderingRule)}}},
          {"grid", {{"anchors", grid.anchors}, {"widths", grid.widths}, {"bins_per_axis", grid.bins_per_axis}}},
          {"columns", samples.column_names()},
          {"scaling", scaling_json(samples.scaling())},
          {"nodes", out_nodes},
          {"source_hash", samples.source_hash()},
          {"rng_seed", nullptr}};
}

RuleDocument rule_from_json(const Json& j) {
  return guarded("rule", [&] {
    RuleDocument doc;
    doc.provenance = j.at("provenance").get<std::string>();
    doc.column_names = j.at("columns").get<std::vector<std::string>>();
    doc.scaling = scaling_from(j.at("scaling"));
    doc.source_hash = j.at("source_hash").get<std::string>();
    const auto& nodes = j.at("nodes");
    const std::size_t d = doc.column_names.size();
    doc.nodes.coords_raw.resize(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto coords = nodes[i].at("coords_raw").get<std::vector<double>>();
      if (coords.size() != d) throw Error(ErrorKind::Schema, "node coordinate count does not match the columns");
      for (std::size_t c = 0; c < d; ++c) doc.nodes.coords_raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = coords[c];
      doc.nodes.weights.push_back(nodes[i].at("weight").get<double>());
      const auto& index = nodes[i].at("index");
      doc.nodes.sample_indices.push_back(index.is_null() ? std::nullopt
                                                         : std::optional<std::size_t>(index.get<std::size_t>()));
    }
    if (doc.provenance == "implicit") {
      doc.nodes.provenance = "sample";
      QuadratureRule rule;
      const auto& basis = j.at("basis");
      rule.basis = BasisSpec::graded_lex(basis.at("dimension").get<std::size_t>(), basis.at("count").get<std::size_t>());
      for (const auto& idx : doc.nodes.sample_indices) {
        if (!idx) throw Error(ErrorKind::Schema, "implicit rule node without a sample index");
        rule.node_indices.push_back(*idx);
      }
      rule.weights = doc.nodes.weights;
      rule.source_hash = doc.source_hash;
      rule.rng_seed = j.at("rng_seed").get<std::uint64_t>();
      rule.deterministic = j.value("deterministic", false);
      doc.rule = std::move(rule);
    } else if (doc.provenance == "binning") {
      doc.nodes.provenance = j.value("node_kind", std::string("bin_center"));
    } else {
      throw Error(ErrorKind::Schema, "unknown rule provenance '" + doc.provenance + "'");
    }
    return doc;
  });
}

Json plan_to_json(const EvaluationPlan& plan) {
  Json entries = Json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"node", e.node},
                       {"sample_index", e.sample_index ? Json(*e.sample_index) : Json(nullptr)},
                       {"coords_raw", e.coords_raw},
                       {"environment", environment_json(e.environment)},
                       {"weight", e.weight},
                       {"seed_count", e.seed_count},
                       {"derived", {{"sigma1", e.derived.sigma1},
                                    {"intensity", e.derived.intensity ? Json(*e.derived.intensity) : Json(nullptr)},
                                    {"sigma2", e.derived.sigma2},
                                    {"sigma3", e.derived.sigma3}}}});
  }
  return {{"format_version", kFormatVersion},
          {"units", {{"v_hub", "m/s"}, {"theta_wind", "deg"}, {"h_s", "m"}, {"t_p", "s"}, {"misalignment", "deg"},
                     {"sigma", "m/s"}}},
          {"columns", plan.column_names},
          {"entries", entries},
          {"rule_provenance", plan.rule_provenance},
          {"source_hash", plan.source_hash},
          {"rule_hash", plan.rule_hash},
          {"model", plan.model},
          {"accuracy_goal", plan.accuracy_goal},
          {"i_ref", plan.i_ref},
          {"defaults", {{"theta_wind", plan.defaults.theta_wind}, {"h_s", plan.defaults.h_s},
                        {"t_p", plan.defaults.t_p}, {"misalignment", plan.defaults.misalignment}}},
          {"total_seeds", plan.total_seeds()}};
}

EvaluationPlan plan_from_json(const Json& j) {
  return guarded("plan", [&] {
    EvaluationPlan plan;
    plan.column_names = j.at("columns").get<std::vector<std::string>>();
    plan.rule_provenance = j.at("rule_provenance").get<std::string>();
    plan.source_hash = j.at("source_hash").get<std::string>();
    plan.rule_hash = j.at("rule_hash").get<std::string>();
    plan.model = j.at("model").get<std::string>();
    plan.accuracy_goal = j.at("accuracy_goal").get<double>();
    plan.i_ref = j.at("i_ref").get<double>();
    const auto& d = j.at("defaults");
    plan.defaults = {d.at("theta_wind").get<double>(), d.at("h_s").get<double>(), d.at("t_p").get<double>(),
                     d.at("misalignment").get<double>()};
    for (const auto& e : j.at("entries")) {
      PlanEntry entry;
      entry.node = e.at("node").get<std::size_t>();
      if (!e.at("sample_index").is_null()) entry.sample_index = e.at("sample_index").get<std::size_t>();
      entry.coords_raw = e.at("coords_raw").get<std::vector<double>>();
      entry.environment = environment_from_json(e.at("environment"));
      entry.weight = e.at("weight").get<double>();
      entry.seed_count = e.at("seed_count").get<unsigned>();
      const auto& t = e.at("derived");
      entry.derived.sigma1 = t.at("sigma1").get<double>();
      if (!t.at("intensity").is_null()) entry.derived.intensity = t.at("intensity").get<double>();
      entry.derived.sigma2 = t.at("sigma2").get<double>();
      entry.derived.sigma3 = t.at("sigma3").get<double>();
      plan.entries.push_back(std::move(entry));
    }
    return plan;
  });
}

Json load_result_to_json(const LoadResult& r) {
  Json nodes = Json::array();
  for (std::size_t e = 0; e < r.nodes.size(); ++e) {
    nodes.push_back({{"node", r.nodes[e]},
                     {"sample_index", r.sample_indices[e] ? Json(*r.sample_indices[e]) : Json(nullptr)},
                     {"weight", r.weights[e]},
                     {"seed_count", r.seed_counts[e]},
                     {"equivalent_loads", r.per_node[e]},
                     {"seed_spread", r.seed_spread[e]}});
  }
  return {{"format_version", kFormatVersion},
          {"components", r.components},
          {"slopes", r.slopes},
          {"nodes", nodes},
          {"aggregate", r.aggregate},
          {"source_hash", r.source_hash},
          {"plan_hash", r.plan_hash},
          {"model", r.model}};
}

LoadResult load_result_from_json(const Json& j) {
  return guarded("load result", [&] {
    LoadResult r;
    r.components = j.at("components").get<std::vector<std::string>>();
    r.slopes = j.at("slopes").get<std::vector<double>>();
    for (const auto& n : j.at("nodes")) {
      r.nodes.push_back(n.at("node").get<std::size_t>());
      r.sample_indices.push_back(n.at("sample_index").is_null()
                                     ? std::nullopt
                                     : std::optional<std::size_t>(n.at("sample_index").get<std::size_t>()));
      r.weights.push_back(n.at("weight").get<double>());
      r.seed_counts.push_back(n.at("seed_count").get<unsigned>());
      r.per_node.push_back(n.at("equivalent_loads").get<std::vector<std::vector<double>>>());
      r.seed_spread.push_back(n.at("seed_spread").get<std::vector<std::vector<double>>>());
    }
    r.aggregate = j.at("aggregate").get<std::vector<std::vector<double>>>();
    r.source_hash = j.at("source_hash").get<std::string>();
    r.plan_hash = j.at("plan_hash").get<std::string>();
    r.model = j.at("model").get<std::string>();
    return r;
  });
}

std::string load_result_csv(const LoadResult& r) {
  std::ostringstream out;
  out << "m";
  for (const auto& c : r.components) out << ',' << c;
  out << '\n';
  for (std::size_t s = 0; s < r.slopes.size(); ++s) {
    out << csv_number(r.slopes[s]);
    for (std::size_t c = 0; c < r.components.size(); ++c) out << ',' << csv_number(r.aggregate[c][s]);
    out << '\n';
  }
  return out.str();
}

Json sequences_to_json(const std::vector<RuleSequence>& sequences) {
  Json out = Json::array();
  for (const auto& s : sequences) {
    Json rules = Json::array();
    for (const auto& r : s.rules) {
      rules.push_back({{"basis_count", r.basis.count}, {"nodes", r.node_indices}, {"weights", r.weights}});
    }
    out.push_back({{"rng_seed", s.rules.empty() ? 0 : s.rules.back().rng_seed}, {"rules", rules}});
  }
  return out;
}

Json genz_to_json(const GenzReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"family", std::string(family_name(r.family))}, {"B", r.bins}, {"N", r.nodes},
                    {"method", r.method}, {"mean_error", r.mean_error}});
  }
  return {{"rows", rows}, {"warnings", report.warnings}};
}

std::string genz_csv(const GenzReport& report) {
  std::ostringstream out;
  out << "family,B,N,method,mean_error\n";
  for (const auto& r : report.rows) {
    out << family_name(r.family) << ',' << r.bins << ',' << r.nodes << ',' << r.method << ','
        << csv_number(r.mean_error) << '\n';
  }
  return out.str();
}

Json convergence_to_json(const ConvergenceReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"component", r.component}, {"m", r.slope}, {"N", r.nodes}, {"relative_error", r.relative_error}});
  }
  Json trends = Json::array();
  for (const auto& t : report.trends) {
    trends.push_back({{"component", t.component},
                      {"m", t.slope},
                      {"first_error", t.first_error},
                      {"last_error", t.last_error},
                      {"decay_orders", number_or_null(t.decay_orders)},
                      {"loglog_slope", t.loglog_slope},
                      {"monotone_fraction", t.monotone_fraction}});
  }
  return {{"rows", rows}, {"trends", trends}};
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "component,m,N,relative_error\n";
  for (const auto& r : report.rows) {
    out << r.component << ',' << csv_number(r.slope) << ',' << r.nodes << ',' << csv_number(r.relative_error) << '\n';
  }
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string payload_hash(const Json& j) { return sha256_hex(dump(j)); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace implquad
