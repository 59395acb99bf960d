// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// array.cpp: see array.hpp.

#include "array.hpp"

#include <cmath>

#include "rng.hpp"

namespace isac {

namespace {

VecC steer(int n, double phi) {
  VecC a(n);
  const double step = kPi * std::sin(phi);
  const double center = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i) {
    const double phase = step * (center - i);
    a(i) = cd(std::cos(phase), std::sin(phase));
  }
  return a;
}

VecC steer_deriv(int n, double phi) {
  VecC da = steer(n, phi);
  const cd jpc(0.0, kPi * std::cos(phi));
  const double center = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i) da(i) *= jpc * (center - i);
  return da;
}

}  // namespace

void ChannelSet::validate() const {
  require(static_cast<int>(h.size()) == sigma2.size(),
          "channel set must carry one noise power per user");
  for (const auto& hc : h) {
    require(hc.allFinite(), "channel entries must be finite");
    require(hc.norm() > 0.0, "each user channel must be nonzero");
  }
  require((sigma2.array() > 0.0).all(), "noise powers must be positive");
}

VecC steer_tx(const ArrayGeometry& geometry, double phi) {
  geometry.validate();
  return steer(geometry.N_t, phi);
}

VecC steer_rx(const ArrayGeometry& geometry, double phi) {
  geometry.validate();
  return steer(geometry.N_r, phi);
}

VecC steer_tx_deriv(const ArrayGeometry& geometry, double phi) {
  geometry.validate();
  return steer_deriv(geometry.N_t, phi);
}

VecC steer_rx_deriv(const ArrayGeometry& geometry, double phi) {
  geometry.validate();
  return steer_deriv(geometry.N_r, phi);
}

ChannelSet generate_channels(const ArrayGeometry& geometry,
                             const std::vector<double>& user_angles,
                             const ChannelModelSpec& model,
                             std::uint64_t seed, double noise_power) {
  geometry.validate();
  require(noise_power > 0.0, "noise power must be positive");
  ChannelSet set;
  const int c_count = static_cast<int>(user_angles.size());
  set.h.reserve(c_count);
  set.sigma2 = VecD::Constant(c_count, noise_power);
  for (int c = 0; c < c_count; ++c) {
    const double angle = user_angles[c];
    require(std::abs(angle) < kPi / 2.0,
            "user angles must lie in (-pi/2, pi/2)");
    VecC h = model.gain * steer_tx(geometry, angle);
    if (model.kind == ChannelModelSpec::Kind::kMultipath) {
      Rng rng(seed, "channel", static_cast<std::uint64_t>(c));
      for (int l = 1; l <= model.paths; ++l) {
        const double ray_angle = rng.uniform(-kPi / 2.0, kPi / 2.0);
        const cd ray_gain =
            rng.cgaussian() * std::sqrt(std::pow(model.decay, l));
        h += ray_gain * steer_tx(geometry, ray_angle);
      }
    }
    set.h.push_back(std::move(h));
  }
  set.validate();
  return set;
}

}  // namespace isac
