// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// rng.hpp: deterministic, stream-splittable random number generation.
//
// Every stochastic component (channel draws, randomization epochs,
// Monte-Carlo observations) derives its own stream from a master seed,
// a short textual tag, and an index. Gaussian variates use an explicit
// Box-Muller transform rather than std::normal_distribution so that the
// byte streams are identical across standard library implementations.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "common.hpp"

namespace isac {

/// Mixes (seed, tag, index) into a well-distributed 64-bit stream seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view tag,
                          std::uint64_t index);

/// Deterministic random stream with implementation-stable distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master_seed, std::string_view tag, std::uint64_t index)
      : engine_(derive_seed(master_seed, tag, index)) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard real Gaussian N(0, 1) via Box-Muller.
  double gaussian();
  /// Standard circularly-symmetric complex Gaussian CN(0, 1):
  /// real and imaginary parts i.i.d. N(0, 1/2).
  cd cgaussian();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Vector/matrix of i.i.d. CN(0,1) entries (column-major fill order).
  VecC cgaussian_vector(int n);
  MatC cgaussian_matrix(int rows, int cols);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace isac
