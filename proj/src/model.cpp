#include "implquad/model.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "implquad/error.hpp"
#include "implquad/rainflow.hpp"
#include "implquad/random.hpp"

namespace implquad {

namespace {

constexpr double kRated = 11.4;

struct Channel {
  const char* name;
  double scale;
  double wind;
  double turbulence;
  double sea;
};

constexpr Channel kChannels[] = {
    {"rotating_hub_fx", 5.0e5, 0.60, 0.40, 0.05},
    {"blade_root_flap_moment", 1.3e7, 0.80, 0.30, 0.01},
    {"yaw_bearing_fx", 6.0e5, 0.50, 0.35, 0.50},
};

std::uint64_t hash_point(const EnvironmentPoint& p, std::uint64_t seed_id, std::uint64_t channel) {
  std::uint64_t h = derive_seed(seed_id, channel);
  for (double v : {p.v_hub, p.theta_wind, p.h_s, p.t_p, p.misalignment}) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

double wind_shape(double v) {
  const double r = v / kRated;
  return 0.35 + r * r * std::exp(1.0 - r * r);
}

double turbulence_shape(double v, double i_ref) {
  return derive_turbulence(v, i_ref, false).sigma1 / derive_turbulence(15.0, i_ref, false).sigma1;
}

double sea_shape(const EnvironmentPoint& p) {
  const double rad = p.misalignment * std::numbers::pi / 180.0;
  return (p.h_s / 1.46) * (1.0 + 0.3 * std::cos(rad)) / std::sqrt(p.t_p / 6.76) / 1.3;
}

double slope_factor(double m) {
  const double x = (m - 5.0) / 7.0;
  return 0.85 + 0.3 * x * x;
}

}  // namespace

SurrogateModel::SurrogateModel(SurrogateOptions options) : options_(options) {
  if (!(options_.noise >= 0.0)) throw Error(ErrorKind::Argument, "surrogate noise must be non-negative");
}

std::string SurrogateModel::id() const {
  std::ostringstream out;
  out << "surrogate(noise=" << options_.noise << (options_.emit_series ? ",series" : "") << ")";
  return out.str();
}

std::vector<std::string> SurrogateModel::components() const {
  std::vector<std::string> out;
  for (const auto& c : kChannels) out.emplace_back(c.name);
  return out;
}

std::vector<std::vector<double>> SurrogateModel::mean_loads(const EnvironmentPoint& point,
                                                            const std::vector<double>& slopes) const {
  point.validate();
  const double wind = wind_shape(point.v_hub);
  const double turbulence = turbulence_shape(point.v_hub, options_.i_ref);
  const double sea = sea_shape(point);
  const double direction = 1.0 + 0.05 * (point.theta_wind / 12.0) * (point.theta_wind / 12.0);
  std::vector<std::vector<double>> out;
  for (const auto& ch : kChannels) {
    std::vector<double> row;
    for (double m : slopes) {
      const double shape = ch.wind * wind + ch.turbulence * std::sqrt(m / 5.0) * turbulence + ch.sea * sea;
      row.push_back(ch.scale * slope_factor(m) * direction * shape);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<double>> SurrogateModel::loads(const EnvironmentPoint& point, std::uint64_t seed_id,
                                                       const std::vector<double>& slopes) const {
  auto out = mean_loads(point, slopes);
  if (options_.noise == 0.0) return out;
  const double s = options_.noise;
  for (std::size_t c = 0; c < out.size(); ++c) {
    Rng rng(hash_point(point, seed_id, c));
    const double factor = std::exp(s * standard_normal(rng) - 0.5 * s * s);
    for (double& v : out[c]) v *= factor;
  }
  return out;
}

ModelOutput SurrogateModel::evaluate(const PlanEntry& entry, std::uint64_t seed_id,
                                     const std::vector<double>& slopes) const {
  ModelOutput out;
  if (!options_.emit_series) {
    out.equivalent_loads = loads(entry.environment, seed_id, slopes);
    return out;
  }
  // Sum of four sinusoids with seed-dependent phases, scaled by the m = 1 load.
  const auto level = loads(entry.environment, seed_id, {1.0});
  constexpr double amplitudes[] = {1.0, 0.5, 0.3, 0.15};
  constexpr double frequencies[] = {3.0, 17.0, 41.0, 97.0};
  for (std::size_t c = 0; c < level.size(); ++c) {
    Rng rng(hash_point(entry.environment, seed_id, 100 + c));
    double phases[4];
    for (double& ph : phases) ph = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    std::vector<double> series(options_.series_length);
    for (std::size_t t = 0; t < series.size(); ++t) {
      const double time = static_cast<double>(t) / static_cast<double>(series.size());
      double v = 0.0;
      for (int i = 0; i < 4; ++i) v += amplitudes[i] * std::sin(2.0 * std::numbers::pi * frequencies[i] * time + phases[i]);
      series[t] = level[c][0] * (1.0 + 0.5 * v);
    }
    out.series.push_back(std::move(series));
  }
  return out;
}

PolynomialModel::PolynomialModel(BasisSpec basis, Eigen::VectorXd coefficients, std::vector<ColumnScaling> scaling)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)), scaling_(std::move(scaling)) {
  if (static_cast<std::size_t>(coefficients_.size()) != basis_.count) {
    throw Error(ErrorKind::Argument, "one coefficient per basis function required");
  }
  if (scaling_.size() != basis_.dimension) throw Error(ErrorKind::Argument, "scaling dimension mismatch");
}

double PolynomialModel::value_scaled(const Eigen::RowVectorXd& scaled_point) const {
  const Eigen::MatrixXd v = vandermonde(Eigen::MatrixXd(scaled_point), basis_);
  return coefficients_.dot(v.col(0));
}

ModelOutput PolynomialModel::evaluate(const PlanEntry& entry, std::uint64_t, const std::vector<double>& slopes) const {
  Eigen::MatrixXd raw(1, static_cast<Eigen::Index>(entry.coords_raw.size()));
  for (std::size_t c = 0; c < entry.coords_raw.size(); ++c) raw(0, static_cast<Eigen::Index>(c)) = entry.coords_raw[c];
  const double value = value_scaled(scale(raw, scaling_).row(0));
  ModelOutput out;
  out.equivalent_loads.assign(1, std::vector<double>(slopes.size(), value));
  return out;
}

CommandModel::CommandModel(std::string command_template, std::vector<std::string> components, std::string work_dir)
    : template_(std::move(command_template)), components_(std::move(components)), work_dir_(std::move(work_dir)) {
  if (template_.find("{input_json}") == std::string::npos || template_.find("{output_json}") == std::string::npos) {
    throw Error(ErrorKind::Argument, "command template must contain {input_json} and {output_json}");
  }
  if (components_.empty()) throw Error(ErrorKind::Argument, "command model needs at least one component");
  if (work_dir_.empty()) work_dir_ = (std::filesystem::temp_directory_path() / "implquad-model").string();
}

ModelOutput CommandModel::evaluate(const PlanEntry& entry, std::uint64_t seed_id,
                                   const std::vector<double>& slopes) const {
  namespace fs = std::filesystem;
  fs::create_directories(work_dir_);
  const std::string stem = "entry" + std::to_string(entry.node) + "_seed" + std::to_string(seed_id);
  const fs::path input = fs::path(work_dir_) / (stem + "_in.json");
  const fs::path output = fs::path(work_dir_) / (stem + "_out.json");

  nlohmann::json request = {
      {"node", entry.node},
      {"seed_id", seed_id},
      {"coords_raw", entry.coords_raw},
      {"environment",
       {{"v_hub", entry.environment.v_hub},
        {"theta_wind", entry.environment.theta_wind},
        {"h_s", entry.environment.h_s},
        {"t_p", entry.environment.t_p},
        {"misalign", entry.environment.misalignment}}},
      {"derived",
       {{"sigma1", entry.derived.sigma1},
        {"sigma2", entry.derived.sigma2},
        {"sigma3", entry.derived.sigma3},
        {"turbulence_intensity", entry.derived.intensity ? nlohmann::json(*entry.derived.intensity) : nlohmann::json()}}},
      {"slopes", slopes},
      {"components", components_},
  };
  {
    std::ofstream out(input);
    out << request.dump(2);
  }
  fs::remove(output);

  std::string command = template_;
  for (const auto& [key, value] : {std::pair<std::string, std::string>{"{input_json}", input.string()},
                                   {"{output_json}", output.string()}}) {
    for (auto pos = command.find(key); pos != std::string::npos; pos = command.find(key, pos + value.size())) {
      command.replace(pos, key.size(), value);
    }
  }
  const int status = std::system(command.c_str());
  if (status != 0) throw Error(ErrorKind::PlanExecution, "model command exited with status " + std::to_string(status));

  std::ifstream in(output);
  if (!in) throw Error(ErrorKind::PlanExecution, "model command did not write " + output.string());
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::PlanExecution, std::string("model output is not valid JSON: ") + e.what());
  }
  ModelOutput result;
  try {
    if (reply.contains("equivalent_loads")) {
      for (const auto& name : components_) result.equivalent_loads.push_back(reply.at("equivalent_loads").at(name).get<std::vector<double>>());
      for (const auto& row : result.equivalent_loads) {
        if (row.size() != slopes.size()) throw Error(ErrorKind::PlanExecution, "model returned the wrong number of slopes");
      }
    } else if (reply.contains("series")) {
      for (const auto& name : components_) result.series.push_back(reply.at("series").at(name).get<std::vector<double>>());
    } else {
      throw Error(ErrorKind::PlanExecution, "model output has neither equivalent_loads nor series");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::PlanExecution, std::string("model output schema error: ") + e.what());
  }
  fs::remove(input);
  fs::remove(output);
  return result;
}

std::vector<std::vector<double>> LoadResult::reaggregate() const {
  std::vector<std::vector<double>> out(components.size(), std::vector<double>(slopes.size(), 0.0));
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (std::size_t s = 0; s < slopes.size(); ++s) {
      std::vector<double> loads;
      for (const auto& node : per_node) loads.push_back(node[c][s]);
      out[c][s] = implquad::aggregate(loads, weights, slopes[s]);
    }
  }
  return out;
}

LoadResult run_plan(const EvaluationPlan& plan, const Model& model, const RunOptions& options) {
  if (options.slopes.empty()) throw Error(ErrorKind::Argument, "at least one S-N slope is required");
  for (double m : options.slopes) {
    if (!(m >= 1.0)) throw Error(ErrorKind::Argument, "inverse S-N slopes must be at least 1");
  }
  const auto components = model.components();
  const std::size_t n_comp = components.size();
  const std::size_t n_slope = options.slopes.size();

  struct Unit {
    std::size_t entry;
    std::uint64_t seed_id;
  };
  std::vector<Unit> units;
  for (std::size_t e = 0; e < plan.entries.size(); ++e) {
    if (plan.entries[e].seed_count == 0 && plan.entries[e].weight > 0.0) {
      throw Error(ErrorKind::Consistency, "entry " + std::to_string(plan.entries[e].node) + " has weight but no seeds");
    }
    for (unsigned s = 1; s <= plan.entries[e].seed_count; ++s) units.push_back({e, s});
  }
  std::vector<std::vector<std::vector<double>>> outputs(units.size());
  std::vector<std::exception_ptr> failures(units.size());

  auto work = [&](std::size_t u) {
    const Unit& unit = units[u];
    const PlanEntry& entry = plan.entries[unit.entry];
    try {
      ModelOutput raw = model.evaluate(entry, unit.seed_id, options.slopes);
      std::vector<std::vector<double>> loads;
      if (!raw.series.empty()) {
        if (raw.series.size() != n_comp) throw Error(ErrorKind::PlanExecution, "wrong number of series");
        for (const auto& series : raw.series) {
          const auto cycles = rainflow_count(series);
          std::vector<double> row;
          for (double m : options.slopes) row.push_back(equivalent_load(cycles, m, options.n_ref));
          loads.push_back(std::move(row));
        }
      } else {
        loads = std::move(raw.equivalent_loads);
      }
      if (loads.size() != n_comp) throw Error(ErrorKind::PlanExecution, "wrong number of components");
      for (const auto& row : loads) {
        if (row.size() != n_slope) throw Error(ErrorKind::PlanExecution, "wrong number of slopes");
        for (double v : row) {
          if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "model returned a non-finite load");
        }
      }
      outputs[u] = std::move(loads);
    } catch (const Error& e) {
      const std::string where = "entry " + std::to_string(entry.node) + ", seed " + std::to_string(unit.seed_id);
      failures[u] = std::make_exception_ptr(Error(e.kind() == ErrorKind::Numeric ? ErrorKind::Numeric : ErrorKind::PlanExecution,
                                                  where + ": " + e.what()));
    } catch (const std::exception& e) {
      failures[u] = std::make_exception_ptr(Error(ErrorKind::PlanExecution, "entry " + std::to_string(entry.node) +
                                                                                ", seed " + std::to_string(unit.seed_id) +
                                                                                ": " + e.what()));
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.parallel, units.size()));
  if (workers == 1) {
    for (std::size_t u = 0; u < units.size(); ++u) work(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t u = next++; u < units.size(); u = next++) work(u);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  LoadResult result;
  result.components = components;
  result.slopes = options.slopes;
  result.source_hash = plan.source_hash;
  result.model = model.id();
  std::size_t u = 0;
  for (std::size_t e = 0; e < plan.entries.size(); ++e) {
    const PlanEntry& entry = plan.entries[e];
    const unsigned seeds = entry.seed_count;
    if (seeds == 0) continue;
    std::vector<std::vector<double>> mean(n_comp, std::vector<double>(n_slope, 0.0));
    std::vector<std::vector<double>> spread(n_comp, std::vector<double>(n_slope, 0.0));
    for (std::size_t c = 0; c < n_comp; ++c) {
      for (std::size_t s = 0; s < n_slope; ++s) {
        double sum = 0.0;
        for (unsigned i = 0; i < seeds; ++i) sum += outputs[u + i][c][s];
        const double avg = sum / seeds;
        double sq = 0.0;
        for (unsigned i = 0; i < seeds; ++i) sq += (outputs[u + i][c][s] - avg) * (outputs[u + i][c][s] - avg);
        mean[c][s] = avg;
        spread[c][s] = seeds > 1 ? std::sqrt(sq / (seeds - 1)) : 0.0;
      }
    }
    u += seeds;
    result.nodes.push_back(entry.node);
    result.sample_indices.push_back(entry.sample_index);
    result.weights.push_back(entry.weight);
    result.seed_counts.push_back(seeds);
    result.per_node.push_back(std::move(mean));
    result.seed_spread.push_back(std::move(spread));
  }
  if (result.per_node.empty()) throw Error(ErrorKind::PlanExecution, "plan has no entries with seeds");
  result.aggregate = result.reaggregate();
  return result;
}

}  // namespace implquad
