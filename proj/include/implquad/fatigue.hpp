#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "implquad/binning.hpp"
#include "implquad/ingest.hpp"
#include "implquad/quadrature.hpp"
#include "implquad/seedbalance.hpp"

namespace implquad {

// Environmental state of one 10-minute condition.
struct EnvironmentPoint {
  double v_hub = 0.0;         // m/s
  double theta_wind = 0.0;    // deg
  double h_s = 0.0;           // m
  double t_p = 1.0;           // s
  double misalignment = 0.0;  // deg

  void validate() const;
};

// Sea state and direction used for columns a rule does not vary.
struct EnvironmentDefaults {
  double theta_wind = 0.0;
  double h_s = 1.46;
  double t_p = 6.76;
  double misalignment = -2.11;
};

inline constexpr double kReferenceTurbulence = 0.16;

struct Turbulence {
  double sigma1 = 0.0;                   // m/s, normal turbulence model
  std::optional<double> intensity;       // sigma1 / v_hub
  double sigma2 = 0.0;                   // lateral, Kaimal ratio 0.8
  double sigma3 = 0.0;                   // upward, Kaimal ratio 0.5
};

// sigma1 = i_ref (0.75 v_hub + 5.6 m/s). Asking for the intensity at v_hub = 0
// is a domain error.
Turbulence derive_turbulence(double v_hub, double i_ref = kReferenceTurbulence, bool with_intensity = true);

// theta_wind - theta_wave wrapped to (-180, 180].
double misalignment(double theta_wind, double theta_wave);

// Column names recognised when mapping rule coordinates onto EnvironmentPoint.
inline constexpr const char* kColumnVHub = "v_hub";
inline constexpr const char* kColumnThetaWind = "theta_wind";
inline constexpr const char* kColumnHs = "h_s";
inline constexpr const char* kColumnTp = "t_p";
inline constexpr const char* kColumnMisalignment = "misalign";

EnvironmentPoint environment_from(const std::vector<std::string>& columns, const std::vector<double>& coords,
                                  const EnvironmentDefaults& defaults = {});

struct PlanEntry {
  std::size_t node = 0;                       // position in the rule
  std::optional<std::size_t> sample_index;    // source sample, when the node is one
  std::vector<double> coords_raw;
  EnvironmentPoint environment;
  double weight = 0.0;
  unsigned seed_count = 0;
  Turbulence derived;
};

struct EvaluationPlan {
  std::vector<std::string> column_names;
  std::vector<PlanEntry> entries;
  std::string rule_provenance;
  std::string source_hash;
  std::string rule_hash;
  std::string model;
  double accuracy_goal = 0.0;
  double i_ref = kReferenceTurbulence;
  EnvironmentDefaults defaults;

  std::size_t total_seeds() const;
};

WeightedNodes weighted_nodes(const QuadratureRule& rule, const SampleSet& samples);

// Binds nodes, weights and seed counts into a replayable plan. Throws
// Consistency when the allocation does not align with the nodes.
EvaluationPlan make_plan(const WeightedNodes& nodes, const SeedAllocation& allocation,
                         const std::vector<std::string>& column_names, const std::string& source_hash,
                         const EnvironmentDefaults& defaults = {}, double i_ref = kReferenceTurbulence);
EvaluationPlan make_plan(const QuadratureRule& rule, const SeedAllocation& allocation, const SampleSet& samples,
                         const EnvironmentDefaults& defaults = {}, double i_ref = kReferenceTurbulence);

// Weighted equivalent load (sum_k u_k^m w_k)^(1/m). Negative loads are a
// domain error; weights must be positive and sum to one.
double aggregate(const std::vector<double>& loads, const std::vector<double>& weights, double m);

}  // namespace implquad
