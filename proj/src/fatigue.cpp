#include "implquad/fatigue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "implquad/error.hpp"

namespace implquad {

void EnvironmentPoint::validate() const {
  if (!(v_hub >= 0.0)) throw Error(ErrorKind::Domain, "hub wind speed must be non-negative");
  if (!(h_s >= 0.0)) throw Error(ErrorKind::Domain, "significant wave height must be non-negative");
  if (!(t_p > 0.0)) throw Error(ErrorKind::Domain, "peak spectral period must be positive");
  if (!std::isfinite(theta_wind) || !std::isfinite(misalignment)) {
    throw Error(ErrorKind::Domain, "directions must be finite");
  }
}

Turbulence derive_turbulence(double v_hub, double i_ref, bool with_intensity) {
  if (!(v_hub >= 0.0)) throw Error(ErrorKind::Domain, "hub wind speed must be non-negative");
  Turbulence t;
  t.sigma1 = i_ref * (0.75 * v_hub + 5.6);
  t.sigma2 = 0.8 * t.sigma1;
  t.sigma3 = 0.5 * t.sigma1;
  if (with_intensity) {
    if (v_hub == 0.0) throw Error(ErrorKind::Domain, "turbulence intensity is undefined at zero wind speed");
    t.intensity = t.sigma1 / v_hub;
  }
  return t;
}

double misalignment(double theta_wind, double theta_wave) {
  double r = std::fmod(theta_wind - theta_wave, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

EnvironmentPoint environment_from(const std::vector<std::string>& columns, const std::vector<double>& coords,
                                  const EnvironmentDefaults& defaults) {
  if (columns.size() != coords.size()) throw Error(ErrorKind::Consistency, "coordinate/column count mismatch");
  EnvironmentPoint p;
  p.theta_wind = defaults.theta_wind;
  p.h_s = defaults.h_s;
  p.t_p = defaults.t_p;
  p.misalignment = defaults.misalignment;
  bool have_speed = false;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::string& name = columns[c];
    if (name == kColumnVHub) {
      p.v_hub = coords[c];
      have_speed = true;
    } else if (name == kColumnThetaWind) {
      p.theta_wind = coords[c];
    } else if (name == kColumnHs) {
      p.h_s = coords[c];
    } else if (name == kColumnTp) {
      p.t_p = coords[c];
    } else if (name == kColumnMisalignment) {
      p.misalignment = coords[c];
    }
  }
  if (!have_speed) throw Error(ErrorKind::Consistency, "an evaluation plan needs a 'v_hub' column");
  p.validate();
  return p;
}

std::size_t EvaluationPlan::total_seeds() const {
  return std::accumulate(entries.begin(), entries.end(), std::size_t{0},
                         [](std::size_t acc, const PlanEntry& e) { return acc + e.seed_count; });
}

WeightedNodes weighted_nodes(const QuadratureRule& rule, const SampleSet& samples) {
  if (rule.source_hash != samples.source_hash()) {
    throw Error(ErrorKind::Provenance, "rule was not built on this sample set");
  }
  WeightedNodes out;
  out.provenance = "sample";
  out.weights = rule.weights;
  out.coords_raw.resize(static_cast<Eigen::Index>(rule.size()), samples.raw().cols());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    out.coords_raw.row(static_cast<Eigen::Index>(k)) = samples.raw().row(static_cast<Eigen::Index>(rule.node_indices[k]));
    out.sample_indices.emplace_back(rule.node_indices[k]);
  }
  return out;
}

EvaluationPlan make_plan(const WeightedNodes& nodes, const SeedAllocation& allocation,
                         const std::vector<std::string>& column_names, const std::string& source_hash,
                         const EnvironmentDefaults& defaults, double i_ref) {
  const auto n = static_cast<std::size_t>(nodes.coords_raw.rows());
  if (nodes.weights.size() != n || allocation.seeds.size() != n) {
    throw Error(ErrorKind::Consistency, "rule has " + std::to_string(n) + " nodes but the allocation has " +
                                            std::to_string(allocation.seeds.size()) + " entries");
  }
  if (static_cast<std::size_t>(nodes.coords_raw.cols()) != column_names.size()) {
    throw Error(ErrorKind::Consistency, "node dimension does not match the column names");
  }
  EvaluationPlan plan;
  plan.column_names = column_names;
  plan.rule_provenance = nodes.provenance;
  plan.source_hash = source_hash;
  plan.accuracy_goal = allocation.accuracy_goal;
  plan.i_ref = i_ref;
  plan.defaults = defaults;
  for (std::size_t k = 0; k < n; ++k) {
    PlanEntry e;
    e.node = k;
    e.sample_index = k < nodes.sample_indices.size() ? nodes.sample_indices[k] : std::nullopt;
    for (Eigen::Index c = 0; c < nodes.coords_raw.cols(); ++c) e.coords_raw.push_back(nodes.coords_raw(static_cast<Eigen::Index>(k), c));
    e.environment = environment_from(column_names, e.coords_raw, defaults);
    e.weight = nodes.weights[k];
    e.seed_count = allocation.seeds[k];
    e.derived = derive_turbulence(e.environment.v_hub, i_ref, e.environment.v_hub > 0.0);
    plan.entries.push_back(std::move(e));
  }
  return plan;
}

EvaluationPlan make_plan(const QuadratureRule& rule, const SeedAllocation& allocation, const SampleSet& samples,
                         const EnvironmentDefaults& defaults, double i_ref) {
  return make_plan(weighted_nodes(rule, samples), allocation, samples.column_names(), samples.source_hash(),
                   defaults, i_ref);
}

double aggregate(const std::vector<double>& loads, const std::vector<double>& weights, double m) {
  if (loads.size() != weights.size() || loads.empty()) {
    throw Error(ErrorKind::Consistency, "loads and weights must be non-empty and aligned");
  }
  if (!(m >= 1.0)) throw Error(ErrorKind::Argument, "inverse S-N slope must be at least 1");
  double largest = 0.0;
  double total_weight = 0.0;
  for (std::size_t k = 0; k < loads.size(); ++k) {
    if (!(loads[k] >= 0.0) || !std::isfinite(loads[k])) throw Error(ErrorKind::Domain, "equivalent loads must be non-negative");
    if (!(weights[k] > 0.0)) throw Error(ErrorKind::Argument, "aggregation weights must be positive");
    largest = std::max(largest, loads[k]);
    total_weight += weights[k];
  }
  if (std::abs(total_weight - 1.0) > 1e-8) throw Error(ErrorKind::Argument, "aggregation weights must sum to one");
  if (largest == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < loads.size(); ++k) sum += std::pow(loads[k] / largest, m) * weights[k];
  return largest * std::pow(sum / total_weight, 1.0 / m);
}

}  // namespace implquad
