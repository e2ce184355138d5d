#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace implquad {

// All randomness goes through std::mt19937_64 (bit-exact across standard
// libraries). The distributions below are written out by hand because the
// std:: distributions are implementation-defined and would break replay.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed splitting rule: child = splitmix64(parent + 0x9E3779B97F4A7C15 * (stream + 1)).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

// Uniform in [0, 1) with 53 random bits.
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
// Standard normal via Box-Muller (one draw per call, second value discarded).
double standard_normal(Rng& rng);
bool coin_flip(Rng& rng);

}  // namespace implquad
