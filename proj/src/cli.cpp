#include "implquad/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "implquad/bench.hpp"
#include "implquad/binning.hpp"
#include "implquad/error.hpp"
#include "implquad/fatigue.hpp"
#include "implquad/ingest.hpp"
#include "implquad/model.hpp"
#include "implquad/quadrature.hpp"
#include "implquad/seedbalance.hpp"
#include "implquad/serialize.hpp"
#include "implquad/synth.hpp"

namespace implquad::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string joined(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

class Session {
 public:
  Session(const RunConfig& cfg, const std::vector<std::string>& args, std::ostream& out)
      : cfg_(cfg), args_(args), out_(out) {}

  int dispatch();

 private:
  fs::path output_path(const std::string& default_name, bool primary = true) const {
    if (primary && !cfg_.output_file.empty()) return cfg_.output_file;
    return fs::path(cfg_.output_dir) / default_name;
  }

  // Payload files are deterministic; run metadata goes to a side file.
  void write_payload(const fs::path& path, const std::string& text) const {
    write_text(path, text);
    if (cfg_.write_meta) {
      Json meta = {{"created_utc", utc_now()},
                   {"command", joined(args_)},
                   {"version", kVersion},
                   {"payload_sha256", sha256_hex(text)}};
      write_text(path.string() + ".meta.json", dump(meta));
    }
    out_ << "wrote " << path.string() << '\n';
  }

  SampleSet load_input_samples(const std::vector<std::string>& columns) const {
    if (cfg_.samples_path.empty()) throw Error(ErrorKind::Argument, "--samples is required");
    if (columns.empty()) throw Error(ErrorKind::Argument, "--columns is required");
    return load_samples(cfg_.samples_path, columns);
  }

  int synth_data();
  int construct();
  int plan();
  int run_campaign();
  int report();
  int genz_bench();

  const RunConfig& cfg_;
  const std::vector<std::string>& args_;
  std::ostream& out_;
};

int Session::dispatch() {
  if (cfg_.subcommand == "synth-data") return synth_data();
  if (cfg_.subcommand == "construct") return construct();
  if (cfg_.subcommand == "plan") return plan();
  if (cfg_.subcommand == "run") return run_campaign();
  if (cfg_.subcommand == "report") return report();
  if (cfg_.subcommand == "genz-bench") return genz_bench();
  throw Error(ErrorKind::Argument, "a subcommand is required");
}

int Session::synth_data() {
  SynthOptions opts;
  opts.rows = cfg_.rows;
  opts.seed = derive_seed(cfg_.seed, "synth");
  opts.dimension = cfg_.dimension;
  const SampleSet samples = synthesize_environment(opts);
  const fs::path path = output_path("samples.csv");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_samples_csv(path, samples.raw(), samples.column_names());
  out_ << "wrote " << path.string() << " (" << samples.size() << " rows, " << samples.dimension() << " columns)\n";
  return kOk;
}

int Session::construct() {
  const SampleSet samples = load_input_samples(cfg_.columns);
  out_ << "samples: " << samples.size() << " rows, columns " << joined(samples.column_names()) << '\n';
  out_ << "source_hash: " << samples.source_hash() << '\n';
  const std::size_t d = samples.dimension();

  if (cfg_.method == "binning") {
    std::vector<BinAxis> axes(d);
    if (!cfg_.bin_counts.empty()) {
      if (cfg_.bin_counts.size() != d && cfg_.bin_counts.size() != 1) {
        throw Error(ErrorKind::Argument, "--bins needs one value or one per column");
      }
      std::vector<long> counts(d);
      for (std::size_t c = 0; c < d; ++c) counts[c] = cfg_.bin_counts.size() == 1 ? cfg_.bin_counts[0] : cfg_.bin_counts[c];
      axes = axes_from_counts(samples, counts, false);
    } else {
      if (cfg_.widths.size() != d && cfg_.widths.size() != 1) {
        throw Error(ErrorKind::Argument, "--widths needs one value or one per column");
      }
      if (!cfg_.anchors.empty() && cfg_.anchors.size() != d) {
        throw Error(ErrorKind::Argument, "--anchors needs one value per column");
      }
      for (std::size_t c = 0; c < d; ++c) {
        axes[c].width = cfg_.widths.size() == 1 ? cfg_.widths[0] : cfg_.widths[c];
        if (!cfg_.anchors.empty()) axes[c].anchor = cfg_.anchors[c];
      }
    }
    const BinGrid grid = bin_samples(samples, axes);
    const WeightedNodes nodes = as_rule(grid, BinNode::Center);
    const Json j = binning_to_json(grid, nodes, samples);
    out_ << "method: binning\n";
    out_ << "occupied bins: " << grid.occupied() << '\n';
    std::ostringstream extent;
    for (std::size_t c = 0; c < d; ++c) extent << (c ? " x " : "") << grid.bins_per_axis[c];
    out_ << "grid: " << extent.str() << '\n';
    write_payload(output_path("rule.json"), dump(j));
    return kOk;
  }
  if (cfg_.method != "implicit") throw Error(ErrorKind::Argument, "--method must be implicit or binning");
  if (!cfg_.nodes) throw Error(ErrorKind::Argument, "--nodes is required for the implicit method");

  const QuadratureRule rule =
      construct_implicit_rule(samples, *cfg_.nodes, {derive_seed(cfg_.seed, "construct"), cfg_.deterministic});
  const MomentCheck check = check_moments(rule, samples);
  const SampleBasis basis(samples.scaled(), rule.basis);
  out_ << "method: implicit\n";
  out_ << "nodes: " << rule.size() << " (budget " << *cfg_.nodes << ")\n";
  out_ << "basis: " << rule.basis.count << " functions, degree " << rule.degree() << '\n';
  out_ << "min weight: " << fixed(check.min_weight, 6) << '\n';
  out_ << "weight sum error: " << fixed(check.weight_sum_error, 3) << '\n';
  out_ << "moment residual (orthonormal basis): " << fixed(check.orthonormal, 3) << '\n';
  out_ << "moment residual (monomials): " << fixed(check.monomial, 3) << '\n';
  out_ << "smallest relative basis residual: " << fixed(basis.residual_norms().minCoeff(), 3) << '\n';
  out_ << "monomial condition number: " << fixed(monomial_condition_number(samples.scaled(), rule.basis), 3) << '\n';
  write_payload(output_path("rule.json"), dump(rule_to_json(rule, samples)));
  return kOk;
}

int Session::plan() {
  if (cfg_.rule_path.empty()) throw Error(ErrorKind::Argument, "--rule is required");
  const Json rule_json = read_json(cfg_.rule_path);
  const RuleDocument doc = rule_from_json(rule_json);
  if (!cfg_.samples_path.empty()) {
    const SampleSet samples = load_samples(cfg_.samples_path, doc.column_names);
    if (samples.source_hash() != doc.source_hash) {
      throw Error(ErrorKind::Provenance, "rule source_hash does not match '" + cfg_.samples_path + "'");
    }
  }
  const std::size_t n = doc.nodes.weights.size();
  const double goal = cfg_.accuracy_goal ? *cfg_.accuracy_goal : goal_from_seeds(*cfg_.seeds_per_node);

  // Uniform comparison: the smallest per-node count meeting the goal on its own.
  const unsigned per_node = cfg_.seeds_per_node ? *cfg_.seeds_per_node : balance_seeds({1.0}, goal).seeds[0];
  const SeedAllocation uniform = uniform_seeds(n, per_node);
  const SeedAllocation balanced = balance_seeds(doc.nodes.weights, goal);
  const SeedAllocation& chosen = cfg_.uniform ? uniform : balanced;

  EvaluationPlan plan = make_plan(doc.nodes, chosen, doc.column_names, doc.source_hash);
  plan.rule_hash = payload_hash(rule_json);
  plan.model = cfg_.model;

  const double ratio = static_cast<double>(balanced.total) / static_cast<double>(uniform.total);
  out_ << "nodes: " << n << '\n';
  out_ << "accuracy goal: " << fixed(goal, 6) << '\n';
  out_ << "uniform total: " << uniform.total << " (" << per_node << " per node)\n";
  out_ << "balanced total: " << balanced.total << " (" << fixed(100.0 * ratio, 3) << "% of uniform)\n";
  out_ << "ratio: " << fixed(ratio, 6) << '\n';
  if (balanced.budget_slack) out_ << "note: every node rounded up to one seed; the budget is slack\n";
  out_ << "allocation: " << (cfg_.uniform ? "uniform" : "balanced") << ", " << plan.total_seeds() << " runs\n";
  write_payload(output_path("plan.json"), dump(plan_to_json(plan)));
  return kOk;
}

int Session::run_campaign() {
  if (cfg_.plan_path.empty()) throw Error(ErrorKind::Argument, "--plan is required");
  const Json plan_json = read_json(cfg_.plan_path);
  const EvaluationPlan plan = plan_from_json(plan_json);

  std::unique_ptr<Model> model;
  if (cfg_.model == "surrogate") {
    SurrogateOptions opts;
    opts.noise = cfg_.noise;
    opts.i_ref = plan.i_ref;
    opts.emit_series = cfg_.series;
    model = std::make_unique<SurrogateModel>(opts);
  } else if (cfg_.model == "command") {
    if (cfg_.command_template.empty()) throw Error(ErrorKind::Argument, "--command-template is required");
    if (cfg_.command_components.empty()) throw Error(ErrorKind::Argument, "--components is required");
    model = std::make_unique<CommandModel>(cfg_.command_template, cfg_.command_components,
                                           (fs::path(cfg_.output_dir) / "work").string());
  } else {
    throw Error(ErrorKind::Argument, "--model must be surrogate or command");
  }

  RunOptions opts;
  opts.slopes = cfg_.slopes;
  opts.parallel = cfg_.parallel;
  opts.n_ref = cfg_.n_ref;
  out_ << "running " << plan.total_seeds() << " work units on " << plan.entries.size() << " nodes with "
       << model->id() << '\n';
  LoadResult result = run_plan(plan, *model, opts);
  result.plan_hash = payload_hash(plan_json);

  out_ << "m";
  for (const auto& c : result.components) out_ << '\t' << c;
  out_ << '\n';
  for (std::size_t s = 0; s < result.slopes.size(); ++s) {
    out_ << result.slopes[s];
    for (std::size_t c = 0; c < result.components.size(); ++c) out_ << '\t' << fixed(result.aggregate[c][s], 6);
    out_ << '\n';
  }
  const fs::path path = output_path("result.json");
  write_payload(path, dump(load_result_to_json(result)));
  fs::path csv = path;
  csv.replace_extension(".csv");
  write_text(csv, load_result_csv(result));
  out_ << "wrote " << csv.string() << '\n';
  return kOk;
}

int Session::report() {
  if (cfg_.rule_path.empty() || cfg_.result_path.empty()) {
    throw Error(ErrorKind::Argument, "--rule and --result are required");
  }
  const Json rule_json = read_json(cfg_.rule_path);
  const RuleDocument doc = rule_from_json(rule_json);
  if (!doc.rule) throw Error(ErrorKind::Argument, "convergence reports need an implicit rule");
  const SampleSet samples = load_input_samples(doc.column_names);
  if (samples.source_hash() != doc.source_hash) {
    throw Error(ErrorKind::Provenance, "rule source_hash does not match '" + cfg_.samples_path + "'");
  }
  const Json result_json = read_json(cfg_.result_path);
  const LoadResult result = load_result_from_json(result_json);
  if (result.source_hash != doc.source_hash) {
    throw Error(ErrorKind::Provenance, "result source_hash does not match the rule");
  }
  if (!cfg_.plan_path.empty()) {
    const Json plan_json = read_json(cfg_.plan_path);
    const EvaluationPlan plan = plan_from_json(plan_json);
    if (plan.rule_hash != payload_hash(rule_json)) {
      throw Error(ErrorKind::Provenance, "plan was not made from this rule");
    }
    if (result.plan_hash != payload_hash(plan_json)) {
      throw Error(ErrorKind::Provenance, "result was not produced from this plan");
    }
  }
  if (cfg_.sequences == 0) throw Error(ErrorKind::Argument, "--sequences must be at least 1");

  const std::uint64_t base = derive_seed(cfg_.seed, "sequence");
  std::vector<RuleSequence> sequences;
  for (std::size_t s = 0; s < cfg_.sequences; ++s) sequences.push_back(build_sequence(*doc.rule, samples, derive_seed(base, s)));
  const ConvergenceReport conv = convergence_report(sequences, result);

  Json j = convergence_to_json(conv);
  j["source_hash"] = doc.source_hash;
  j["rule_hash"] = payload_hash(rule_json);
  j["result_hash"] = payload_hash(result_json);
  j["sequences"] = cfg_.sequences;
  const bool unequal = std::adjacent_find(result.seed_counts.begin(), result.seed_counts.end(),
                                          std::not_equal_to<>()) != result.seed_counts.end();
  j["notes"] = Json::array();
  if (unequal) {
    j["notes"].push_back("per-node loads come from unequal seed counts; the error estimate includes seed noise "
                         "and may be slightly larger");
  }

  out_ << "component\tm\tfirst\tlast\tdecay_orders\tloglog_slope\n";
  for (const auto& t : conv.trends) {
    out_ << t.component << '\t' << t.slope << '\t' << fixed(t.first_error, 3) << '\t' << fixed(t.last_error, 3)
         << '\t' << fixed(t.decay_orders, 3) << '\t' << fixed(t.loglog_slope, 3) << '\n';
  }
  if (unequal) out_ << "note: " << j["notes"][0].get<std::string>() << '\n';
  const fs::path path = output_path("convergence.json");
  write_payload(path, dump(j));
  fs::path csv = path;
  csv.replace_extension(".csv");
  write_text(csv, convergence_csv(conv));
  out_ << "wrote " << csv.string() << '\n';
  write_payload(output_path("sequences.json", false), dump(sequences_to_json(sequences)));
  return kOk;
}

int Session::genz_bench() {
  std::unique_ptr<SampleSet> samples;
  if (!cfg_.samples_path.empty()) {
    samples = std::make_unique<SampleSet>(load_input_samples(cfg_.columns));
  } else {
    SynthOptions opts;
    opts.rows = cfg_.rows;
    opts.seed = derive_seed(cfg_.seed, "synth");
    opts.dimension = cfg_.dimension;
    samples = std::make_unique<SampleSet>(synthesize_environment(opts));
  }
  GenzOptions opts;
  if (!cfg_.bin_counts.empty()) opts.bin_counts = cfg_.bin_counts;
  opts.repetitions = cfg_.repetitions;
  opts.seed = derive_seed(cfg_.seed, "genz-bench");
  if (!cfg_.families.empty()) {
    opts.families.clear();
    for (const auto& f : cfg_.families) opts.families.push_back(family_from_name(f));
  }
  out_ << "genz benchmark: " << samples->size() << " samples in " << samples->dimension() << "D, "
       << opts.repetitions << " repetitions\n";
  const GenzReport report = run_genz_experiment(*samples, opts);
  for (const auto& w : report.warnings) out_ << "warning: " << w << '\n';
  out_ << "family\tB\tN\tbinning\timplicit\n";
  for (const auto& r : report.rows) {
    if (r.method != "binning") continue;
    const GenzRow* imp = report.find(r.family, r.bins, "implicit");
    out_ << family_name(r.family) << '\t' << r.bins << '\t' << r.nodes << '\t' << fixed(r.mean_error, 3) << '\t'
         << (imp ? fixed(imp->mean_error, 3) : std::string("-")) << '\n';
  }
  Json j = genz_to_json(report);
  j["source_hash"] = samples->source_hash();
  j["repetitions"] = opts.repetitions;
  j["rng_seed"] = opts.seed;
  const fs::path path = output_path("genz.json");
  write_payload(path, dump(j));
  fs::path csv = path;
  csv.replace_extension(".csv");
  write_text(csv, genz_csv(report));
  out_ << "wrote " << csv.string() << '\n';
  return kOk;
}

void add_samples(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--samples", cfg.samples_path, "Sample CSV file");
}

void add_columns(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--columns", cfg.columns, "Comma-separated columns to use, in order")->delimiter(',');
}

void add_seed(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Master random seed");
}

void add_output(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--out-dir", cfg.output_dir, "Output directory (default: $IMPLQUAD_OUTPUT_DIR or .)");
  sub->add_option("--out", cfg.output_file, "Primary output file");
  sub->add_flag("!--no-meta", cfg.write_meta, "Do not write .meta.json side files");
}

}  // namespace

void RunConfig::validate() const {
  if (subcommand == "plan") {
    if (accuracy_goal.has_value() == seeds_per_node.has_value()) {
      throw Error(ErrorKind::Argument, "exactly one of --accuracy-goal and --seeds-per-node is required");
    }
    if (accuracy_goal && !(*accuracy_goal > 0.0)) throw Error(ErrorKind::Argument, "--accuracy-goal must be positive");
    if (seeds_per_node && *seeds_per_node == 0) throw Error(ErrorKind::Argument, "--seeds-per-node must be positive");
    if (uniform && !seeds_per_node) throw Error(ErrorKind::Argument, "--uniform needs --seeds-per-node");
  }
  if (slopes.empty()) throw Error(ErrorKind::Argument, "--slopes must not be empty");
  for (double m : slopes) {
    if (!(m >= 1.0) || m != std::floor(m)) throw Error(ErrorKind::Argument, "--slopes must be positive integers");
  }
  if (parallel == 0) throw Error(ErrorKind::Argument, "--parallel must be at least 1");
  if (nodes && *nodes == 0) throw Error(ErrorKind::Argument, "node budget must be at least 1");
}

int exit_code_for(const std::string& kind) {
  static const char* runtime[] = {"cannot_eliminate", "rank_deficiency", "incomplete_data", "plan_execution",
                                  "numeric", "domain", "internal"};
  for (const char* k : runtime) {
    if (kind == k) return kRuntimeFailure;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
  if (cfg.output_dir.empty()) cfg.output_dir = ".";

  auto report_error = [&](const std::string& kind, const std::string& message) {
    const int code = exit_code_for(kind);
    Json j = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    err << j.dump() << '\n';
    return code;
  };

  CLI::App app{"Implicit quadrature rules for fatigue load campaigns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* synth = app.add_subcommand("synth-data", "Write a synthetic environmental sample CSV");
  synth->add_option("--rows", cfg.rows, "Number of rows");
  synth->add_option("--dimension", cfg.dimension, "5 (all columns) or 2 (v_hub, theta_wind)");
  add_seed(synth, cfg);
  add_output(synth, cfg);

  auto* construct = app.add_subcommand("construct", "Build a quadrature rule from samples");
  add_samples(construct, cfg);
  add_columns(construct, cfg);
  construct->add_option("--method", cfg.method, "implicit or binning")->check(CLI::IsMember({"implicit", "binning"}));
  construct->add_option("--nodes", cfg.nodes, "Node budget N+1 (implicit)");
  construct->add_option("--widths", cfg.widths, "Bin widths in raw units (binning)")->delimiter(',');
  construct->add_option("--anchors", cfg.anchors, "Bin anchors in raw units (binning)")->delimiter(',');
  construct->add_option("--bins", cfg.bin_counts, "Bins per column over the data range (binning)")->delimiter(',');
  construct->add_flag("--deterministic", cfg.deterministic, "Always eliminate along +c");
  add_seed(construct, cfg);
  add_output(construct, cfg);

  auto* plan = app.add_subcommand("plan", "Allocate seeds to the nodes of a rule");
  plan->add_option("--rule", cfg.rule_path, "Rule JSON")->required();
  add_samples(plan, cfg);
  auto* goal = plan->add_option("--accuracy-goal", cfg.accuracy_goal, "Seed error budget");
  auto* spn = plan->add_option("--seeds-per-node", cfg.seeds_per_node, "Goal as S^(-1/2)");
  goal->excludes(spn);
  plan->add_flag("--uniform", cfg.uniform, "Allocate --seeds-per-node everywhere instead of balancing");
  plan->add_option("--model", cfg.model, "Model label recorded in the plan");
  add_output(plan, cfg);

  auto* run_cmd = app.add_subcommand("run", "Evaluate a plan and aggregate equivalent loads");
  run_cmd->add_option("--plan", cfg.plan_path, "Plan JSON")->required();
  run_cmd->add_option("--model", cfg.model, "surrogate or command")->check(CLI::IsMember({"surrogate", "command"}));
  run_cmd->add_option("--command-template", cfg.command_template, "Shell command with {input_json} and {output_json}");
  run_cmd->add_option("--components", cfg.command_components, "Components reported by the command")->delimiter(',');
  run_cmd->add_option("--noise", cfg.noise, "Surrogate seed noise (relative)");
  run_cmd->add_flag("--series", cfg.series, "Surrogate emits time series that are rainflow counted");
  run_cmd->add_option("--n-ref", cfg.n_ref, "Reference cycle count for series outputs");
  run_cmd->add_option("--slopes", cfg.slopes, "Inverse S-N slopes")->delimiter(',');
  run_cmd->add_option("--parallel", cfg.parallel, "Concurrent work units");
  add_output(run_cmd, cfg);

  auto* report = app.add_subcommand("report", "Convergence of nested rule sequences");
  report->add_option("--rule", cfg.rule_path, "Rule JSON")->required();
  report->add_option("--result", cfg.result_path, "Load result JSON")->required();
  report->add_option("--plan", cfg.plan_path, "Plan JSON (checks the hash chain)");
  add_samples(report, cfg);
  report->add_option("--sequences", cfg.sequences, "Number of nested sequences");
  add_seed(report, cfg);
  add_output(report, cfg);

  auto* genz = app.add_subcommand("genz-bench", "Genz test-function comparison of binning and implicit rules");
  add_samples(genz, cfg);
  add_columns(genz, cfg);
  genz->add_option("--rows", cfg.rows, "Synthetic rows when no --samples is given");
  genz->add_option("--dimension", cfg.dimension, "Synthetic dimension when no --samples is given");
  genz->add_option("--bins", cfg.bin_counts, "Bins per axis, B")->delimiter(',');
  genz->add_option("--repetitions", cfg.repetitions, "Random functions per family");
  genz->add_option("--families", cfg.families, "Families to run")->delimiter(',');
  add_seed(genz, cfg);
  add_output(genz, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_error("argument", e.what());
  }
  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();

  try {
    cfg.validate();
    Session session(cfg, args, out);
    return session.dispatch();
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.kind())), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
}

}  // namespace implquad::cli
