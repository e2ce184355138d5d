#include "implquad/bench.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "implquad/binning.hpp"
#include "implquad/error.hpp"

namespace implquad {

std::string_view family_name(GenzFamily family) {
  switch (family) {
    case GenzFamily::Oscillatory: return "oscillatory";
    case GenzFamily::ProductPeak: return "product_peak";
    case GenzFamily::CornerPeak: return "corner_peak";
    case GenzFamily::Gaussian: return "gaussian";
    case GenzFamily::C0: return "c0";
    case GenzFamily::Discontinuous: return "discontinuous";
  }
  return "unknown";
}

GenzFamily family_from_name(std::string_view name) {
  for (GenzFamily f : kAllGenzFamilies) {
    if (family_name(f) == name) return f;
  }
  throw Error(ErrorKind::Argument, "unknown Genz family '" + std::string(name) + "'");
}

double evaluate_genz(const GenzFunction& f, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const auto d = x.size();
  const auto& a = f.a;
  const auto& b = f.b;
  switch (f.family) {
    case GenzFamily::Oscillatory: {
      double s = 2.0 * M_PI * b(0);
      for (Eigen::Index i = 0; i < d; ++i) s += a(i) * x(i);
      return std::cos(s);
    }
    case GenzFamily::ProductPeak: {
      double p = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) p /= 1.0 / (a(i) * a(i)) + (x(i) - b(i)) * (x(i) - b(i));
      return p;
    }
    case GenzFamily::CornerPeak: {
      double s = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) s += a(i) * x(i);
      return std::pow(s, -static_cast<double>(d + 1));
    }
    case GenzFamily::Gaussian: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) s += a(i) * a(i) * (x(i) - b(i)) * (x(i) - b(i));
      return std::exp(-s);
    }
    case GenzFamily::C0: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) s += a(i) * std::abs(x(i) - b(i));
      return std::exp(-s);
    }
    case GenzFamily::Discontinuous: {
      if (x(0) > b(0) || (d > 1 && x(1) > b(1))) return 0.0;
      double s = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) s += a(i) * x(i);
      return std::exp(s);
    }
  }
  return 0.0;
}

GenzFunction random_genz(GenzFamily family, std::size_t dimension, Rng& rng) {
  GenzFunction f;
  f.family = family;
  f.a.resize(static_cast<Eigen::Index>(dimension));
  f.b.resize(static_cast<Eigen::Index>(dimension));
  for (auto& v : f.a) v = uniform01(rng);
  for (auto& v : f.b) v = uniform01(rng);
  const double norm = f.a.norm();
  if (norm > 0.0) f.a *= kGenzDifficulty / norm;
  return f;
}

const GenzRow* GenzReport::find(GenzFamily family, long bins, std::string_view method) const {
  for (const auto& r : rows) {
    if (r.family == family && r.bins == bins && r.method == method) return &r;
  }
  return nullptr;
}

GenzReport run_genz_experiment(const SampleSet& samples, const GenzOptions& options) {
  if (options.repetitions == 0) throw Error(ErrorKind::Argument, "at least one repetition is required");
  const Eigen::MatrixXd& x = samples.scaled();
  const Eigen::Index k = x.rows();
  const std::size_t d = samples.dimension();
  const std::size_t n_fam = options.families.size();
  const std::size_t reps = options.repetitions;

  // Integrand values at every sample, [family][repetition] -> K values.
  std::vector<std::vector<Eigen::VectorXd>> values(n_fam, std::vector<Eigen::VectorXd>(reps));
  std::vector<std::vector<GenzFunction>> functions(n_fam, std::vector<GenzFunction>(reps));
  std::vector<std::vector<double>> reference(n_fam, std::vector<double>(reps));
  const std::uint64_t base = derive_seed(options.seed, "genz");
  for (std::size_t f = 0; f < n_fam; ++f) {
    for (std::size_t r = 0; r < reps; ++r) {
      Rng rng(derive_seed(base, r * 16 + static_cast<std::size_t>(options.families[f])));
      functions[f][r] = random_genz(options.families[f], d, rng);
      Eigen::VectorXd v(k);
      for (Eigen::Index i = 0; i < k; ++i) v(i) = evaluate_genz(functions[f][r], x.row(i));
      reference[f][r] = v.mean();
      values[f][r] = std::move(v);
    }
  }

  GenzReport report;
  for (long bins : options.bin_counts) {
    std::vector<BinAxis> axes(d, BinAxis{1.0 / static_cast<double>(bins), 0.0, bins});
    const BinGrid grid = bin_points(x, axes);
    const std::size_t n = grid.occupied();

    for (std::size_t f = 0; f < n_fam; ++f) {
      double total = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        double estimate = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          estimate += grid.weight(c) * evaluate_genz(functions[f][r], grid.centers.row(static_cast<Eigen::Index>(c)));
        }
        total += std::abs(estimate - reference[f][r]);
      }
      report.rows.push_back({options.families[f], bins, n, "binning", total / static_cast<double>(reps)});
    }

    if (n > static_cast<std::size_t>(k)) {
      report.warnings.push_back("B=" + std::to_string(bins) + ": node budget " + std::to_string(n) +
                                " exceeds the sample count; implicit rule skipped");
      continue;
    }
    QuadratureRule rule;
    try {
      rule = construct_implicit_rule(samples, n, {derive_seed(options.seed, static_cast<std::uint64_t>(bins)), false});
    } catch (const RankDeficiencyError& e) {
      report.warnings.push_back("B=" + std::to_string(bins) + ": " + e.what() + "; implicit rule skipped");
      continue;
    }
    for (std::size_t f = 0; f < n_fam; ++f) {
      double total = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        double estimate = 0.0;
        for (std::size_t c = 0; c < rule.size(); ++c) {
          estimate += rule.weights[c] * values[f][r](static_cast<Eigen::Index>(rule.node_indices[c]));
        }
        total += std::abs(estimate - reference[f][r]);
      }
      report.rows.push_back({options.families[f], bins, n, "implicit", total / static_cast<double>(reps)});
    }
  }
  return report;
}

std::vector<ConvergencePoint> relative_error_curve(const std::vector<RuleSequence>& sequences,
                                                   const NodeValues& node_values, double reference, double m) {
  if (!(reference > 0.0)) throw Error(ErrorKind::Domain, "reference equivalent load must be positive");
  if (sequences.empty()) throw Error(ErrorKind::Argument, "no sequences given");
  NodeValues powered;
  for (const auto& [node, u] : node_values) {
    if (u < 0.0) throw Error(ErrorKind::Domain, "equivalent loads must be non-negative");
    powered[node] = std::pow(u / reference, m);
  }
  const std::size_t full = sequences.front().rules.front().size();
  std::vector<ConvergencePoint> out;
  for (std::size_t n = 1; n < full; ++n) {
    double total = 0.0;
    for (const auto& s : sequences) {
      // Loads are normalised by the reference, so L_n / L_full = A_n[(u/L)^m]^(1/m).
      const double ratio = std::pow(apply_rule(member_with_nodes(s, n), powered), 1.0 / m);
      total += std::abs(ratio - 1.0);
    }
    out.push_back({n, total / static_cast<double>(sequences.size())});
  }
  return out;
}

ConvergenceReport convergence_report(const std::vector<RuleSequence>& sequences, const LoadResult& result) {
  ConvergenceReport report;
  for (std::size_t c = 0; c < result.components.size(); ++c) {
    for (std::size_t s = 0; s < result.slopes.size(); ++s) {
      NodeValues values;
      for (std::size_t e = 0; e < result.per_node.size(); ++e) {
        if (!result.sample_indices[e]) {
          throw Error(ErrorKind::Consistency, "convergence reports need a rule whose nodes are sample points");
        }
        values[*result.sample_indices[e]] = result.per_node[e][c][s];
      }
      const double m = result.slopes[s];
      const auto curve = relative_error_curve(sequences, values, result.aggregate[c][s], m);
      for (const auto& p : curve) report.rows.push_back({result.components[c], m, p.nodes, p.relative_error});

      TrendSummary t;
      t.component = result.components[c];
      t.slope = m;
      std::vector<ConvergencePoint> tail;
      for (const auto& p : curve) {
        if (p.nodes >= 2) tail.push_back(p);
      }
      if (!tail.empty()) {
        t.first_error = tail.front().relative_error;
        t.last_error = tail.back().relative_error;
        t.decay_orders = t.last_error > 0.0 ? std::log10(t.first_error / t.last_error)
                                            : std::numeric_limits<double>::infinity();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t used = 0;
        std::size_t decreasing = 0;
        for (std::size_t i = 0; i < tail.size(); ++i) {
          if (i > 0 && tail[i].relative_error <= tail[i - 1].relative_error) ++decreasing;
          if (tail[i].relative_error <= 0.0) continue;
          const double lx = std::log(static_cast<double>(tail[i].nodes));
          const double ly = std::log(tail[i].relative_error);
          sx += lx;
          sy += ly;
          sxx += lx * lx;
          sxy += lx * ly;
          ++used;
        }
        if (used >= 2) {
          const double nn = static_cast<double>(used);
          t.loglog_slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        }
        t.monotone_fraction = tail.size() > 1 ? static_cast<double>(decreasing) / static_cast<double>(tail.size() - 1) : 1.0;
      }
      report.trends.push_back(t);
    }
  }
  return report;
}

}  // namespace implquad
