// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// test_array.cpp: steering vectors, derivatives, and channel generation.

#include <doctest.h>

#include "core/array.hpp"
#include "core/crb.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using namespace isac;
using namespace isac::testing;

TEST_CASE("boresight steering is all ones") {
  const ArrayGeometry g{4, 4};
  const VecC a = steer_tx(g, 0.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(a(i).real() == doctest::Approx(1.0));
    CHECK(a(i).imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("two-element array at 30 degrees") {
  const ArrayGeometry g{2, 2};
  const VecC a = steer_tx(g, deg2rad(30.0));
  // sin 30 = 1/2: phases are +pi/4 and -pi/4 about the array center.
  CHECK(a(0).real() == doctest::Approx(std::cos(kPi / 4)).epsilon(1e-12));
  CHECK(a(0).imag() == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-12));
  CHECK(a(1).real() == doctest::Approx(std::cos(kPi / 4)).epsilon(1e-12));
  CHECK(a(1).imag() == doctest::Approx(-std::sin(kPi / 4)).epsilon(1e-12));
}

TEST_CASE("steering norm and conjugation identities") {
  Rng rng(555u);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(32));
    const double phi = rng.uniform(-1.5, 1.5);
    const ArrayGeometry g{n, n};
    const VecC a = steer_tx(g, phi);
    CHECK(a.squaredNorm() == doctest::Approx(n).epsilon(1e-12));
    const VecC a_neg = steer_tx(g, -phi);
    CHECK((a_neg - a.conjugate()).norm() < 1e-12 * n);
  }
}

TEST_CASE("derivative identities against finite differences") {
  Rng rng(556u);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(32));
    const double phi = rng.uniform(-1.4, 1.4);
    const ArrayGeometry g{n, n};
    const VecC da = steer_tx_deriv(g, phi);
    const VecC fd = fd_steering_deriv(n, phi, 1e-5);
    CHECK((da - fd).norm() <= 1e-6 * (1.0 + fd.norm()));

    // Centered arrays make the derivative orthogonal to the steering vector.
    const VecC a = steer_tx(g, phi);
    CHECK(std::abs(a.dot(da)) <= 1e-10 * n);

    // Receive-side norm identities.
    const VecC b = steer_rx(g, phi);
    const VecC db = steer_rx_deriv(g, phi);
    CHECK(b.squaredNorm() == doctest::Approx(n).epsilon(1e-9));
    const double z1 = compute_Z1(n, phi);
    if (n > 1)
      CHECK(db.squaredNorm() == doctest::Approx(n * z1).epsilon(1e-9));
    else
      CHECK(db.squaredNorm() == doctest::Approx(0.0));
  }
}

TEST_CASE("single-element derivative is zero") {
  const ArrayGeometry g{1, 1};
  CHECK(steer_tx_deriv(g, 0.7).norm() == doctest::Approx(0.0));
}

TEST_CASE("los channel at boresight is all ones") {
  const ArrayGeometry g{8, 8};
  const ChannelSet set =
      generate_channels(g, {0.0}, ChannelModelSpec{}, 1u, 1e-11);
  REQUIRE(set.users() == 1);
  CHECK((set.h[0] - VecC::Ones(8)).norm() < 1e-12);
  CHECK(set.sigma2(0) == doctest::Approx(1e-11));
}

TEST_CASE("channel generation is deterministic in the seed") {
  const ArrayGeometry g{8, 8};
  ChannelModelSpec spec;
  spec.kind = ChannelModelSpec::Kind::kMultipath;
  spec.paths = 3;
  spec.decay = 0.4;
  const std::vector<double> angles{-0.6, 0.1, 0.8};
  const ChannelSet a = generate_channels(g, angles, spec, 42u, 1e-11);
  const ChannelSet b = generate_channels(g, angles, spec, 42u, 1e-11);
  const ChannelSet c = generate_channels(g, angles, spec, 43u, 1e-11);
  REQUIRE(a.users() == 3);
  for (int u = 0; u < 3; ++u) {
    CHECK((a.h[u] - b.h[u]).norm() == 0.0);
    CHECK(a.h[u].allFinite());
  }
  // A different seed must actually change the multipath component.
  CHECK((a.h[0] - c.h[0]).norm() > 1e-9);
}
