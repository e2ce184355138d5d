#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "implquad/ingest.hpp"
#include "implquad/model.hpp"
#include "implquad/quadrature.hpp"
#include "implquad/random.hpp"

namespace implquad {

// Genz test integrand families on [0,1]^d.
enum class GenzFamily { Oscillatory = 1, ProductPeak, CornerPeak, Gaussian, C0, Discontinuous };

inline constexpr GenzFamily kAllGenzFamilies[] = {GenzFamily::Oscillatory, GenzFamily::ProductPeak,
                                                  GenzFamily::CornerPeak,  GenzFamily::Gaussian,
                                                  GenzFamily::C0,          GenzFamily::Discontinuous};

std::string_view family_name(GenzFamily family);
GenzFamily family_from_name(std::string_view name);

struct GenzFunction {
  GenzFamily family = GenzFamily::Oscillatory;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

inline constexpr double kGenzDifficulty = 2.5;  // ||a||_2 after rescaling

double evaluate_genz(const GenzFunction& f, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// a and b uniform in the unit hypercube, then a rescaled to ||a||_2 = 5/2.
GenzFunction random_genz(GenzFamily family, std::size_t dimension, Rng& rng);

struct GenzOptions {
  std::vector<long> bin_counts{1, 2, 3, 4, 5, 6, 7};
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
  std::vector<GenzFamily> families{std::begin(kAllGenzFamilies), std::end(kAllGenzFamilies)};
};

struct GenzRow {
  GenzFamily family;
  long bins = 0;
  std::size_t nodes = 0;
  std::string method;  // "binning" or "implicit"
  double mean_error = 0.0;
};

struct GenzReport {
  std::vector<GenzRow> rows;
  std::vector<std::string> warnings;

  const GenzRow* find(GenzFamily family, long bins, std::string_view method) const;
};

// For each B: bin the scaled samples with B bins per axis, build an implicit
// rule with as many nodes as occupied bins, and average |E[u] - A_N[u]| over
// the repetitions. E[u] is the plain average over all scaled samples. Budgets
// above K are skipped with a warning.
GenzReport run_genz_experiment(const SampleSet& samples, const GenzOptions& options);

struct ConvergencePoint {
  std::size_t nodes = 0;
  double relative_error = 0.0;
};

// Relative error of the weighted equivalent load along nested sequences:
// mean_k |L_{n,k} - L_full| / L_full with L_{n,k} = (A_n^(k)[u^m])^(1/m).
// `node_values` maps sample index to u. Zero reference is a domain error.
std::vector<ConvergencePoint> relative_error_curve(const std::vector<RuleSequence>& sequences,
                                                   const NodeValues& node_values, double reference, double m);

struct ConvergenceRow {
  std::string component;
  double slope = 0.0;
  std::size_t nodes = 0;
  double relative_error = 0.0;
};

struct TrendSummary {
  std::string component;
  double slope = 0.0;
  double first_error = 0.0;    // at the smallest node count above one
  double last_error = 0.0;     // at the largest node count below the full rule
  double decay_orders = 0.0;   // log10(first / last)
  double loglog_slope = 0.0;   // least-squares fit of log error vs log n
  double monotone_fraction = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<TrendSummary> trends;
};

// One curve per (component, slope), referenced to the result's aggregate.
ConvergenceReport convergence_report(const std::vector<RuleSequence>& sequences, const LoadResult& result);

}  // namespace implquad
