// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// array.hpp: centered-ULA steering vectors, derivatives, and channels.
//
// Both arrays are half-wavelength uniform linear arrays referenced to
// their center, so element i carries phase pi*sin(phi)*((N-1)/2 - i).
// Centering makes da/dphi orthogonal to a, which the closed-form CRB
// relies on.

#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "errors.hpp"

namespace isac {

struct ArrayGeometry {
  int N_t = 1;  ///< transmit elements
  int N_r = 1;  ///< receive elements

  void validate() const {
    require(N_t >= 1 && N_r >= 1, "antenna counts must be >= 1");
  }
};

/// Downlink user channels and per-user noise powers.
struct ChannelSet {
  std::vector<VecC> h;  ///< per-user N_t channel vectors
  VecD sigma2;          ///< per-user noise power [W]

  int users() const { return static_cast<int>(h.size()); }
  void validate() const;
};

/// Channel generation selector.
struct ChannelModelSpec {
  enum class Kind { kLosOnly, kMultipath };
  Kind kind = Kind::kLosOnly;
  double gain = 1.0;    ///< LoS amplitude beta
  int paths = 3;        ///< extra multipath rays L (multipath only)
  double decay = 0.5;   ///< per-ray power decay factor (multipath only)
};

/// Transmit steering vector a(phi), length N_t, ||a||^2 = N_t.
VecC steer_tx(const ArrayGeometry& geometry, double phi);
/// Receive steering vector b(phi), length N_r, ||b||^2 = N_r.
VecC steer_rx(const ArrayGeometry& geometry, double phi);
/// Angular derivative da/dphi = j*pi*cos(phi)*diag((N_t-1)/2, ..., -(N_t-1)/2)*a.
VecC steer_tx_deriv(const ArrayGeometry& geometry, double phi);
/// Angular derivative db/dphi (same construction on the receive array).
VecC steer_rx_deriv(const ArrayGeometry& geometry, double phi);

/// Deterministic channel generation. LoS-only yields h_c = gain * a(phi_c);
/// multipath adds `paths` extra rays with complex Gaussian gains of power
/// decay^l and uniformly random angles in (-pi/2, pi/2). Noise powers are
/// filled with `noise_power` for every user.
ChannelSet generate_channels(const ArrayGeometry& geometry,
                             const std::vector<double>& user_angles,
                             const ChannelModelSpec& model,
                             std::uint64_t seed, double noise_power);

}  // namespace isac
