#include "implquad/synth.hpp"

#include <algorithm>
#include <cmath>

#include "implquad/error.hpp"
#include "implquad/fatigue.hpp"
#include "implquad/random.hpp"

namespace implquad {

SampleSet synthesize_environment(const SynthOptions& options) {
  if (options.rows == 0) throw Error(ErrorKind::Argument, "synthetic data needs at least one row");
  if (options.dimension != 2 && options.dimension != 5) {
    throw Error(ErrorKind::Argument, "synthetic data supports dimension 2 or 5");
  }
  Rng rng(options.seed);
  const auto k = static_cast<Eigen::Index>(options.rows);
  Eigen::MatrixXd points(k, static_cast<Eigen::Index>(options.dimension));
  for (Eigen::Index r = 0; r < k; ++r) {
    double v = 0.0;
    do {
      v = options.weibull_scale * std::pow(-std::log(1.0 - uniform01(rng)), 1.0 / options.weibull_shape);
    } while (v < 0.5 || v > 30.0);
    const double theta = uniform(rng, -12.0, 12.0);
    points(r, 0) = v;
    points(r, 1) = theta;
    if (options.dimension == 2) continue;

    const double hs = (0.3 + 0.045 * v + 0.0045 * v * v) * std::exp(0.25 * standard_normal(rng));
    const double tp = std::max(2.0, 3.2 + 2.6 * std::sqrt(hs) + 0.6 * standard_normal(rng));
    // Mostly aligned; one in ten conditions has swell from an unrelated direction.
    const double wave_dir =
        uniform01(rng) < 0.9 ? theta + 2.0 + 18.0 * standard_normal(rng) : uniform(rng, -180.0, 180.0);
    points(r, 2) = hs;
    points(r, 3) = tp;
    points(r, 4) = misalignment(theta, wave_dir);
  }
  std::vector<std::string> names{kColumnVHub, kColumnThetaWind};
  if (options.dimension == 5) {
    names.insert(names.end(), {kColumnHs, kColumnTp, kColumnMisalignment});
  }
  return SampleSet(std::move(points), std::move(names));
}

}  // namespace implquad
