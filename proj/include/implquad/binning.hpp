#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "implquad/ingest.hpp"

namespace implquad {

// One axis of an equidistant grid. Intervals are [anchor + i*width,
// anchor + (i+1)*width). With a fixed `count` the last interval is closed on
// the right so that the top of the range is kept.
struct BinAxis {
  double width = 1.0;
  std::optional<double> anchor;  // default: 0 for non-negative data, data minimum otherwise
  std::optional<long> count;     // fixed number of bins; otherwise enough to cover the data
};

enum class BinNode { Center, MemberMean };

struct BinGrid {
  std::vector<double> anchors;
  std::vector<double> widths;
  std::vector<long> bins_per_axis;          // grid extent covering the data
  std::vector<std::vector<long>> cells;     // occupied cells, lexicographic
  std::vector<std::size_t> counts;          // K_k per occupied cell
  std::size_t total = 0;                    // K
  Eigen::MatrixXd centers;                  // occupied cells x d, raw units
  Eigen::MatrixXd member_means;             // occupied cells x d, raw units

  std::size_t occupied() const { return counts.size(); }
  double weight(std::size_t cell) const { return static_cast<double>(counts[cell]) / static_cast<double>(total); }
};

// Bins raw coordinates. Throws Argument on a non-positive width.
BinGrid bin_samples(const SampleSet& samples, const std::vector<BinAxis>& axes);
BinGrid bin_points(const Eigen::MatrixXd& points, const std::vector<BinAxis>& axes);

// Splits every column's [lo, hi] scaling range into `counts[c]` equal bins.
std::vector<BinAxis> axes_from_counts(const SampleSet& samples, const std::vector<long>& counts, bool scaled);

// Rule-shaped view of arbitrary nodes (bin centers are not sample points).
struct WeightedNodes {
  Eigen::MatrixXd coords_raw;  // nodes x d
  std::vector<double> weights;
  std::string provenance;      // "bin_center", "bin_mean" or "sample"
  std::vector<std::optional<std::size_t>> sample_indices;
};

WeightedNodes as_rule(const BinGrid& grid, BinNode node = BinNode::Center);

}  // namespace implquad
