#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "implquad/basis.hpp"
#include "implquad/fatigue.hpp"

namespace implquad {

// What a model returns for one (plan entry, seed). Either equivalent loads per
// component and slope, or one load time series per component; series are
// rainflow counted by the runner.
struct ModelOutput {
  std::vector<std::vector<double>> equivalent_loads;  // [component][slope]
  std::vector<std::vector<double>> series;            // [component][time]
};

// Black box evaluated per (entry, seed_id). The seed id is the only source of
// stochasticity; implementations must be safe to call concurrently.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::string> components() const = 0;
  virtual ModelOutput evaluate(const PlanEntry& entry, std::uint64_t seed_id, const std::vector<double>& slopes) const = 0;
};

struct SurrogateOptions {
  double noise = 0.02;  // relative standard deviation of one seed
  double i_ref = kReferenceTurbulence;
  bool emit_series = false;
  std::size_t series_length = 600;
};

// Smooth stand-in for an aeroelastic simulator with three channels: rotating
// hub longitudinal force, blade-root flapwise moment and yaw-bearing
// longitudinal force. Responses peak near rated wind speed (11.4 m/s); the
// yaw bearing carries the strongest sea-state term. Seed noise is
// multiplicative log-normal with unit mean, so the seed average converges to
// `mean_loads`.
class SurrogateModel : public Model {
 public:
  explicit SurrogateModel(SurrogateOptions options = {});

  std::string id() const override;
  std::vector<std::string> components() const override;
  ModelOutput evaluate(const PlanEntry& entry, std::uint64_t seed_id, const std::vector<double>& slopes) const override;

  // Noise-free loads [component][slope].
  std::vector<std::vector<double>> mean_loads(const EnvironmentPoint& point, const std::vector<double>& slopes) const;
  // One seed's loads [component][slope].
  std::vector<std::vector<double>> loads(const EnvironmentPoint& point, std::uint64_t seed_id,
                                         const std::vector<double>& slopes) const;

  const SurrogateOptions& options() const { return options_; }

 private:
  SurrogateOptions options_;
};

// Noise-free polynomial in the scaled coordinates; the same value for every slope.
class PolynomialModel : public Model {
 public:
  PolynomialModel(BasisSpec basis, Eigen::VectorXd coefficients, std::vector<ColumnScaling> scaling);

  std::string id() const override { return "polynomial"; }
  std::vector<std::string> components() const override { return {"polynomial"}; }
  ModelOutput evaluate(const PlanEntry& entry, std::uint64_t seed_id, const std::vector<double>& slopes) const override;

  double value_scaled(const Eigen::RowVectorXd& scaled_point) const;

 private:
  BasisSpec basis_;
  Eigen::VectorXd coefficients_;
  std::vector<ColumnScaling> scaling_;
};

// External simulator wired in through a shell command. `{input_json}` and
// `{output_json}` in the template are replaced by file paths. The input file
// holds {node, seed_id, columns, coords_raw, environment, derived, slopes};
// the command must write {"equivalent_loads": {component: [one per slope]}} or
// {"series": {component: [...]}} and exit with status 0.
class CommandModel : public Model {
 public:
  CommandModel(std::string command_template, std::vector<std::string> components, std::string work_dir = {});

  std::string id() const override { return "command"; }
  std::vector<std::string> components() const override { return components_; }
  ModelOutput evaluate(const PlanEntry& entry, std::uint64_t seed_id, const std::vector<double>& slopes) const override;

 private:
  std::string template_;
  std::vector<std::string> components_;
  std::string work_dir_;
};

struct LoadResult {
  std::vector<std::string> components;
  std::vector<double> slopes;
  std::vector<std::size_t> nodes;                // plan entry positions with seeds
  std::vector<std::optional<std::size_t>> sample_indices;
  std::vector<double> weights;
  std::vector<unsigned> seed_counts;
  // [entry][component][slope]
  std::vector<std::vector<std::vector<double>>> per_node;
  std::vector<std::vector<std::vector<double>>> seed_spread;
  // [component][slope]
  std::vector<std::vector<double>> aggregate;
  std::string source_hash;
  std::string plan_hash;
  std::string model;

  // Recomputes `aggregate` from per_node and weights.
  std::vector<std::vector<double>> reaggregate() const;
};

struct RunOptions {
  std::vector<double> slopes{2, 3, 5, 10, 12};
  std::size_t parallel = 1;
  std::optional<double> n_ref;  // reference cycle count for series outputs
};

// Evaluates every (entry, seed_id) with seed_id = 1..S_k, averages per node and
// aggregates. The reduction runs in entry/seed order after all work units
// finish, so the result does not depend on scheduling.
LoadResult run_plan(const EvaluationPlan& plan, const Model& model, const RunOptions& options = {});

}  // namespace implquad
