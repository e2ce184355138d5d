#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "implquad/bench.hpp"
#include "implquad/binning.hpp"
#include "implquad/fatigue.hpp"
#include "implquad/ingest.hpp"
#include "implquad/model.hpp"
#include "implquad/quadrature.hpp"

namespace implquad {

using Json = nlohmann::json;

// A rule as stored on disk. Implicit rules carry sample indices; binning rules
// carry bin cells instead and have index null.
struct RuleDocument {
  std::string provenance;  // "implicit" or "binning"
  std::vector<std::string> column_names;
  std::vector<ColumnScaling> scaling;
  std::string source_hash;
  std::optional<QuadratureRule> rule;  // implicit rules only
  WeightedNodes nodes;
};

Json rule_to_json(const QuadratureRule& rule, const SampleSet& samples);
Json binning_to_json(const BinGrid& grid, const WeightedNodes& nodes, const SampleSet& samples);
RuleDocument rule_from_json(const Json& j);

Json plan_to_json(const EvaluationPlan& plan);
EvaluationPlan plan_from_json(const Json& j);

Json load_result_to_json(const LoadResult& result);
LoadResult load_result_from_json(const Json& j);
// Rows are slopes, columns are components.
std::string load_result_csv(const LoadResult& result);

Json sequences_to_json(const std::vector<RuleSequence>& sequences);

Json genz_to_json(const GenzReport& report);
std::string genz_csv(const GenzReport& report);

Json convergence_to_json(const ConvergenceReport& report);
std::string convergence_csv(const ConvergenceReport& report);

// Canonical text of a payload: two-space indent, sorted keys, trailing newline.
std::string dump(const Json& j);
// SHA-256 of dump(j).
std::string payload_hash(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace implquad
