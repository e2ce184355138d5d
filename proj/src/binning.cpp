#include "implquad/binning.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "implquad/error.hpp"

namespace implquad {

BinGrid bin_points(const Eigen::MatrixXd& points, const std::vector<BinAxis>& axes) {
  const Eigen::Index k = points.rows();
  const Eigen::Index d = points.cols();
  if (k == 0) throw Error(ErrorKind::EmptyData, "cannot bin zero samples");
  if (static_cast<std::size_t>(d) != axes.size()) {
    throw Error(ErrorKind::Argument, "need one bin axis per dimension (" + std::to_string(d) + ")");
  }
  BinGrid grid;
  grid.total = static_cast<std::size_t>(k);
  for (Eigen::Index c = 0; c < d; ++c) {
    const BinAxis& axis = axes[static_cast<std::size_t>(c)];
    if (!(axis.width > 0.0) || !std::isfinite(axis.width)) {
      throw Error(ErrorKind::Argument, "bin width must be positive");
    }
    const double lo = points.col(c).minCoeff();
    const double hi = points.col(c).maxCoeff();
    const double anchor = axis.anchor.value_or(lo >= 0.0 ? 0.0 : lo);
    if (anchor > lo) throw Error(ErrorKind::Argument, "bin anchor lies above the smallest sample");
    grid.anchors.push_back(anchor);
    grid.widths.push_back(axis.width);
    if (axis.count) {
      if (*axis.count < 1) throw Error(ErrorKind::Argument, "bin count must be at least 1");
      grid.bins_per_axis.push_back(*axis.count);
    } else {
      // Left-closed bins: a maximum exactly on an edge opens a new bin.
      grid.bins_per_axis.push_back(static_cast<long>(std::floor((hi - anchor) / axis.width)) + 1);
    }
  }

  std::map<std::vector<long>, std::pair<std::size_t, Eigen::VectorXd>> cells;
  std::vector<long> cell(static_cast<std::size_t>(d));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const long last = grid.bins_per_axis[ci] - 1;
      const long index = static_cast<long>(std::floor((points(r, c) - grid.anchors[ci]) / grid.widths[ci]));
      cell[ci] = std::clamp(index, 0L, last);
    }
    auto [it, inserted] = cells.try_emplace(cell, 0, Eigen::VectorXd::Zero(d));
    it->second.first += 1;
    it->second.second += points.row(r).transpose();
  }

  const auto n = static_cast<Eigen::Index>(cells.size());
  grid.centers.resize(n, d);
  grid.member_means.resize(n, d);
  Eigen::Index row = 0;
  for (const auto& [key, entry] : cells) {
    grid.cells.push_back(key);
    grid.counts.push_back(entry.first);
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      grid.centers(row, c) = grid.anchors[ci] + (static_cast<double>(key[ci]) + 0.5) * grid.widths[ci];
    }
    grid.member_means.row(row) = entry.second.transpose() / static_cast<double>(entry.first);
    ++row;
  }
  return grid;
}

BinGrid bin_samples(const SampleSet& samples, const std::vector<BinAxis>& axes) {
  return bin_points(samples.raw(), axes);
}

std::vector<BinAxis> axes_from_counts(const SampleSet& samples, const std::vector<long>& counts, bool scaled) {
  if (counts.size() != samples.dimension()) throw Error(ErrorKind::Argument, "need one bin count per dimension");
  std::vector<BinAxis> axes;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 1) throw Error(ErrorKind::Argument, "bin count must be at least 1");
    const double lo = scaled ? 0.0 : samples.scaling()[c].lo;
    const double hi = scaled ? 1.0 : samples.scaling()[c].hi;
    axes.push_back({(hi - lo) / static_cast<double>(counts[c]), lo, counts[c]});
  }
  return axes;
}

WeightedNodes as_rule(const BinGrid& grid, BinNode node) {
  WeightedNodes out;
  out.coords_raw = node == BinNode::Center ? grid.centers : grid.member_means;
  out.provenance = node == BinNode::Center ? "bin_center" : "bin_mean";
  for (std::size_t i = 0; i < grid.occupied(); ++i) out.weights.push_back(grid.weight(i));
  out.sample_indices.assign(grid.occupied(), std::nullopt);
  return out;
}

}  // namespace implquad
