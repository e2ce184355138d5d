#include "implquad/rainflow.hpp"

#include <cmath>
#include <string>

#include "implquad/error.hpp"

namespace implquad {

std::vector<double> reversals(const std::vector<double>& series) {
  std::vector<double> out;
  for (double x : series) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Numeric, "load series contains non-finite values");
    if (!out.empty() && x == out.back()) continue;
    if (out.size() >= 2) {
      const double previous = out[out.size() - 1] - out[out.size() - 2];
      const double next = x - out.back();
      // Same direction: the last point was not a turning point.
      if ((previous > 0.0) == (next > 0.0)) out.back() = x;
      else out.push_back(x);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

std::vector<Cycle> rainflow_count(const std::vector<double>& series) {
  const std::vector<double> points = reversals(series);
  std::vector<Cycle> cycles;
  if (points.size() < 2) return cycles;

  std::vector<double> stack;
  for (double p : points) {
    stack.push_back(p);
    while (stack.size() >= 4) {
      const std::size_t n = stack.size();
      const double inner = std::abs(stack[n - 2] - stack[n - 3]);
      const double before = std::abs(stack[n - 3] - stack[n - 4]);
      const double after = std::abs(stack[n - 1] - stack[n - 2]);
      if (inner > before || inner > after) break;
      cycles.push_back({inner, 0.5 * (stack[n - 2] + stack[n - 3]), 1.0});
      stack.erase(stack.end() - 3, stack.end() - 1);
    }
  }
  for (std::size_t i = 1; i < stack.size(); ++i) {
    cycles.push_back({std::abs(stack[i] - stack[i - 1]), 0.5 * (stack[i] + stack[i - 1]), 0.5});
  }
  return cycles;
}

double equivalent_load(const std::vector<Cycle>& cycles, double m, std::optional<double> n_ref) {
  if (!(m >= 1.0)) throw Error(ErrorKind::Argument, "inverse S-N slope must be at least 1");
  if (n_ref && !(*n_ref > 0.0)) throw Error(ErrorKind::Argument, "reference cycle count must be positive");
  if (cycles.empty()) return 0.0;
  double largest = 0.0;
  double counted = 0.0;
  for (const auto& c : cycles) {
    if (!(c.range >= 0.0)) throw Error(ErrorKind::Domain, "cycle ranges must be non-negative");
    largest = std::max(largest, c.range);
    counted += c.count;
  }
  if (largest == 0.0) return 0.0;
  // Factor out the largest range so r^m cannot overflow.
  double damage = 0.0;
  for (const auto& c : cycles) damage += c.count * std::pow(c.range / largest, m);
  return largest * std::pow(damage / n_ref.value_or(counted), 1.0 / m);
}

}  // namespace implquad
