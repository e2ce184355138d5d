#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "implquad/basis.hpp"

namespace implquad {

struct ColumnScaling {
  double lo = 0.0;
  double hi = 1.0;
};

// K joint measurements in d dimensions, with the affine map into [0,1]^d.
// Immutable after construction.
class SampleSet {
 public:
  // Scaling is the per-column (min, max) of `points`.
  SampleSet(Eigen::MatrixXd points, std::vector<std::string> column_names, std::string source_hash = {});
  SampleSet(Eigen::MatrixXd points, std::vector<std::string> column_names, std::vector<ColumnScaling> scaling,
            std::string source_hash = {});

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(points_.cols()); }
  const Eigen::MatrixXd& raw() const { return points_; }
  const Eigen::MatrixXd& scaled() const { return scaled_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<ColumnScaling>& scaling() const { return scaling_; }
  // Content fingerprint (hex SHA-256) used to chain artifacts.
  const std::string& source_hash() const { return source_hash_; }

 private:
  void validate_and_scale();

  Eigen::MatrixXd points_;
  Eigen::MatrixXd scaled_;
  std::vector<std::string> column_names_;
  std::vector<ColumnScaling> scaling_;
  std::string source_hash_;
};

// Reads a UTF-8, comma separated file with a header row. Only `columns` are
// kept, in the order given. The source hash is the SHA-256 of the file bytes.
SampleSet load_samples(const std::filesystem::path& path, const std::vector<std::string>& columns);
SampleSet parse_samples(const std::string& content, const std::vector<std::string>& columns,
                        std::string source_hash = {});

void write_samples_csv(const std::filesystem::path& path, const Eigen::MatrixXd& points,
                       const std::vector<std::string>& column_names);

// x' = (x - lo) / (hi - lo) per column. With `strict`, coordinates outside
// [lo, hi] are rejected.
Eigen::MatrixXd scale(const Eigen::MatrixXd& raw, const std::vector<ColumnScaling>& scaling, bool strict = false);
Eigen::MatrixXd unscale(const Eigen::MatrixXd& scaled, const std::vector<ColumnScaling>& scaling);

struct MomentVector {
  std::vector<double> values;
  std::vector<MultiIndex> multi_indices;
};

// mu_j = (1/K) sum_k phi_j(y_k) over the scaled samples, monomial basis.
MomentVector empirical_moments(const SampleSet& samples, std::size_t count);

std::string sha256_hex(const std::string& bytes);
std::string fingerprint(const Eigen::MatrixXd& points, const std::vector<std::string>& column_names);
std::vector<std::string> split_list(const std::string& text, char separator = ',');

}  // namespace implquad
