#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace implquad::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kUsageError = 2;

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "IMPLQUAD_OUTPUT_DIR";

// Parsed command line. Validation enforces the cross-field rules.
struct RunConfig {
  std::string subcommand;
  std::string samples_path;
  std::string rule_path;
  std::string plan_path;
  std::string result_path;
  std::vector<std::string> columns;
  std::string method = "implicit";
  std::optional<std::size_t> nodes;
  std::vector<double> widths;
  std::vector<double> anchors;
  std::vector<long> bin_counts;
  std::uint64_t seed = 1;
  bool deterministic = false;
  std::optional<double> accuracy_goal;
  std::optional<unsigned> seeds_per_node;
  bool uniform = false;
  std::vector<double> slopes{2, 3, 5, 10, 12};
  std::size_t parallel = 1;
  std::string model = "surrogate";
  std::string command_template;
  std::vector<std::string> command_components;
  double noise = 0.02;
  bool series = false;
  std::optional<double> n_ref;
  std::size_t sequences = 5;
  std::size_t repetitions = 100;
  std::vector<std::string> families;
  std::size_t rows = 5000;
  std::size_t dimension = 5;
  std::string output_dir;
  std::string output_file;
  bool write_meta = true;

  // Throws implquad::Error(Argument) on violations.
  void validate() const;
};

// Runs one command line (without the program name). Output goes to `out`;
// errors are written to `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Error kind to exit code.
int exit_code_for(const std::string& kind);

}  // namespace implquad::cli
