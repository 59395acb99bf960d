// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// rng.cpp: see rng.hpp.

#include "rng.hpp"

#include <cmath>

namespace isac {

namespace {

// splitmix64 finalizer: the standard 64-bit avalanche mix.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// FNV-1a over the tag bytes, so distinct stream names decorrelate.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view tag,
                          std::uint64_t index) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ fnv1a(tag));
  h = mix64(h ^ index);
  return h;
}

double Rng::uniform() {
  // 53 random bits scaled into [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is kept away from 0 so the log is finite.
  double u1 = uniform();
  if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

cd Rng::cgaussian() {
  // Independent of gaussian()'s spare cache: draw both parts directly so
  // interleaving real and complex draws stays reproducible.
  double u1 = uniform();
  if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));  // E|z|^2 = 1
  const double angle = 2.0 * kPi * u2;
  return cd(radius * std::cos(angle), radius * std::sin(angle));
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection-free modulo is biased; use Lemire-style rejection instead.
  if (n == 0) return 0;
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

VecC Rng::cgaussian_vector(int n) {
  VecC v(n);
  for (int i = 0; i < n; ++i) v(i) = cgaussian();
  return v;
}

MatC Rng::cgaussian_matrix(int rows, int cols) {
  MatC m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cgaussian();
  return m;
}

}  // namespace isac
