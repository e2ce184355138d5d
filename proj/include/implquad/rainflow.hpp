#pragma once

#include <optional>
#include <vector>

namespace implquad {

struct Cycle {
  double range = 0.0;
  double mean = 0.0;
  double count = 1.0;  // 1.0 for a closed cycle, 0.5 for a half cycle
};

// Turning points of a series: plateaus collapsed, end points kept.
std::vector<double> reversals(const std::vector<double>& series);

// Four-point rainflow counting. Closed cycles are extracted while reversals
// are pushed onto a stack; every adjacent pair left in the residue counts as a
// half cycle, so the number of half cycles is (reversals - 1). A constant or
// single-point series gives no cycles.
std::vector<Cycle> rainflow_count(const std::vector<double>& series);

// (sum_i n_i r_i^m / n_ref)^(1/m). Without n_ref the counted number of cycles
// is used, which keeps the result in load units. Empty cycle lists give 0.
double equivalent_load(const std::vector<Cycle>& cycles, double m, std::optional<double> n_ref = std::nullopt);

}  // namespace implquad
