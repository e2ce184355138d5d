#pragma once

#include <cstddef>
#include <cstdint>

#include "implquad/ingest.hpp"

namespace implquad {

// Synthetic stand-in for offshore met-mast data. Columns (v_hub, theta_wind,
// h_s, t_p, misalign): Weibull hub wind speed truncated to [0.5, 30] m/s,
// wind direction uniform in [-12, 12] deg, wave height growing with wind
// speed plus log-normal scatter, peak period tied to sqrt(h_s), and a
// near-zero-mean misalignment with a heavier tail. Not a measurement record.
struct SynthOptions {
  std::size_t rows = 5000;
  std::uint64_t seed = 1;
  std::size_t dimension = 5;  // 5: full set; 2: (v_hub, theta_wind)
  double weibull_shape = 2.1;
  double weibull_scale = 11.4;
};

SampleSet synthesize_environment(const SynthOptions& options);

}  // namespace implquad
