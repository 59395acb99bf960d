// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// test_crb.cpp: closed-form CRB versus the Fisher-information oracle.

#include <doctest.h>

#include <cmath>

#include "core/crb.hpp"
#include "fixtures.hpp"
#include "support/oracles.hpp"

using namespace isac;
using namespace isac::testing;

namespace {

SensingParams params_for(const TargetPose& pose, double sigma_s2 = 1e-11,
                         double t_s = 1.0, double B = 1e8) {
  SensingParams p;
  p.g = 1.0 / (pose.d_o * pose.d_o);
  p.sigma_s2 = sigma_s2;
  p.t_s = t_s;
  p.B = B;
  return p;
}

}  // namespace

TEST_CASE("scalar factors") {
  CHECK(compute_Z1(16, 0.0) ==
        doctest::Approx(kPi * kPi * 255.0 / 12.0).epsilon(1e-15));
  CHECK(compute_Z1(16, 0.0) == doctest::Approx(209.73).epsilon(1e-3));
  CHECK(compute_Z1(1, 0.9) == 0.0);
  CHECK(compute_Z1(16, kPi / 2.0) == doctest::Approx(0.0).epsilon(1e-25));

  CHECK(compute_Z2(1e8) == doctest::Approx(17.5655).epsilon(1e-3));
  CHECK(compute_Z2(kSpeedOfLight / (4.0 * kPi)) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("contour harmonic projection X_k") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const LosPartition part = compute_los_partition(c, pose, 8);

  // phi_o == varphi and n == 0 makes both terms vanish.
  ContourModel cos_only = c;
  cos_only.n = VecD::Zero(c.Q);
  CHECK(compute_Xk(part, pose, cos_only, 3) == doctest::Approx(0.0));

  // Independent evaluation at k=1.
  const double u = part.subsections[1].u_k;
  double cs = 0.0, sn = 0.0;
  for (int q = 1; q <= c.Q; ++q) {
    cs += c.m(q - 1) * std::cos(q * u);
    sn += c.n(q - 1) * std::sin(q * u);
  }
  TargetPose turned = pose;
  turned.varphi = 0.3;
  const double delta = turned.phi_o - turned.varphi;
  const double expect = sq(cs * std::sin(delta) - sn * std::cos(delta));
  CHECK(compute_Xk(part, turned, c, 1) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("closed form for a rank-one beam on a point target") {
  Rng rng(2024u);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_t = 2 + static_cast<int>(rng.below(15));
    const int n_r = n_t + static_cast<int>(rng.below(8));
    const ArrayGeometry g{n_t, n_r};
    TargetPose pose;
    pose.d_o = rng.uniform(10.0, 50.0);
    pose.phi_o = rng.uniform(-1.0, 1.0);
    pose.varphi = rng.uniform(-kPi, kPi);
    const double P_t = rng.uniform(0.5, 4.0);
    const double l_1 = rng.uniform(0.5, 3.0);
    const SensingParams sp = params_for(pose, rng.uniform(1e-12, 1e-10),
                                        rng.uniform(0.1, 2.0));
    const LosPartition part = make_point_partition(pose, l_1);

    const VecC a = steer_tx(g, pose.phi_o);
    const MatC r_x = (P_t / n_t) * (a * a.adjoint());
    const double crb = crb_phi_closed_form(part, r_x, sp, g);
    // The centered array kills the derivative cross terms, leaving only
    // the Z1 term of the bracket.
    const double z1 = compute_Z1(n_r, pose.phi_o);
    const double expect =
        sp.sigma_s2 / (2.0 * sp.g * sp.g * n_r * sp.t_s * l_1 * z1 * P_t *
                       n_t);
    CHECK(crb == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("homogeneity and noise scaling") {
  Rng rng(90210u);
  for (int trial = 0; trial < 100; ++trial) {
    const ContourModel c = random_contour(rng);
    const TargetPose pose = random_pose(rng);
    const int n_t = 2 + static_cast<int>(rng.below(15));
    const ArrayGeometry g{n_t, n_t + 2};
    const LosPartition part =
        compute_los_partition(c, pose, 1 + static_cast<int>(rng.below(6)),
                              1024);
    const MatC r_x = random_covariance(rng, n_t, rng.uniform(0.5, 2.0));
    const SensingParams sp = params_for(pose);

    const double base = crb_phi_closed_form(part, r_x, sp, g);
    CHECK(base > 0.0);
    for (const double scale : {0.5, 2.0, 10.0}) {
      const double scaled = crb_phi_closed_form(part, scale * r_x, sp, g);
      CHECK(scaled * scale == doctest::Approx(base).epsilon(1e-9));
    }

    SensingParams noisy = sp;
    noisy.sigma_s2 = 3.7 * sp.sigma_s2;
    CHECK(crb_phi_closed_form(part, r_x, noisy, g) ==
          doctest::Approx(3.7 * base).epsilon(1e-9));
    CHECK(crb_phi_oracle(part, pose, c, r_x, noisy, g,
                         JacobianMode::kApproximate) ==
          doctest::Approx(3.7 * crb_phi_oracle(part, pose, c, r_x, sp, g,
                                               JacobianMode::kApproximate))
              .epsilon(1e-9));
  }
}

TEST_CASE("closed form equals oracle exactly for point targets") {
  Rng rng(11u);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_t = 2 + static_cast<int>(rng.below(15));
    const int n_r = n_t + static_cast<int>(rng.below(10));
    const ArrayGeometry g{n_t, n_r};
    TargetPose pose;
    pose.d_o = rng.uniform(5.0, 60.0);
    pose.phi_o = rng.uniform(-1.2, 1.2);
    pose.varphi = rng.uniform(-kPi, kPi);
    const LosPartition part = make_point_partition(pose, rng.uniform(0.1, 4.0));
    const MatC r_x = random_covariance(rng, n_t, rng.uniform(0.1, 10.0));
    const SensingParams sp = params_for(pose, rng.uniform(1e-12, 1e-9),
                                        rng.uniform(0.01, 5.0),
                                        rng.uniform(1e7, 5e8));
    ContourModel point;
    point.Q = 1;
    point.m = VecD::Zero(1);
    point.n = VecD::Zero(1);

    const double closed = crb_phi_closed_form(part, r_x, sp, g);
    const double oracle = crb_phi_oracle(part, pose, point, r_x, sp, g,
                                         JacobianMode::kExact);
    CHECK(closed == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("oracle agrees with the default scenario closed form loosely") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const ArrayGeometry g{16, 16};
  const LosPartition part = compute_los_partition(c, pose, 8);
  Rng rng(60u);
  const MatC r_x = random_covariance(rng, 16, 1.0);
  const SensingParams sp = params_for(pose);
  const double closed = crb_phi_closed_form(part, r_x, sp, g);
  const double oracle = crb_phi_oracle(part, pose, c, r_x, sp, g,
                                       JacobianMode::kApproximate);
  CHECK(std::abs(closed - oracle) / oracle <= 0.15);
}

TEST_CASE("observation-period scaling in the point-target configuration") {
  Rng rng(8080u);
  TargetPose pose = default_pose();
  const ArrayGeometry g{12, 16};
  const LosPartition part = make_point_partition(pose, 1.3);
  ContourModel point;
  point.Q = 1;
  point.m = VecD::Zero(1);
  point.n = VecD::Zero(1);
  const MatC r_x = random_covariance(rng, 12, 2.0);
  SensingParams sp = params_for(pose);
  const double base =
      crb_phi_oracle(part, pose, point, r_x, sp, g, JacobianMode::kExact);
  sp.t_s *= 2.0;
  const double doubled =
      crb_phi_oracle(part, pose, point, r_x, sp, g, JacobianMode::kExact);
  CHECK(doubled == doctest::Approx(0.5 * base).epsilon(1e-9));
}

TEST_CASE("Schur reduction equals the full-matrix block inverse") {
  Rng rng(123123u);
  for (int trial = 0; trial < 100; ++trial) {
    const ContourModel c = random_contour(rng);
    const TargetPose pose = random_pose(rng);
    const int n_t = 4 + static_cast<int>(rng.below(12));
    const ArrayGeometry g{n_t, n_t + 1};
    const LosPartition part = compute_los_partition(
        c, pose, 2 + static_cast<int>(rng.below(6)), 1024);
    const MatC r_x = random_covariance(rng, n_t, 1.0);
    const SensingParams sp = params_for(pose);
    const FimBlocks blocks = assemble_fim_blocks(
        part, pose, c, r_x, sp, g, JacobianMode::kExact);

    const Eigen::Matrix3d j = efim_schur(blocks);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(j);
    if (eig.eigenvalues().minCoeff() <
        1e-9 * eig.eigenvalues().maxCoeff())
      continue;  // ill-conditioned draws are exercised elsewhere
    const double via_schur = j.inverse()(1, 1);
    const double via_full = crb_phi_from_full_fim(blocks);
    CHECK(via_schur == doctest::Approx(via_full).epsilon(1e-8));

    // EFIM stays PSD when the full matrix is PSD.
    CHECK(eig.eigenvalues().minCoeff() > -1e-8 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("information monotonicity along a subsection beam") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const ArrayGeometry g{16, 16};
  const LosPartition part = compute_los_partition(c, pose, 8);
  Rng rng(31415u);
  const MatC r_x = random_covariance(rng, 16, 1.0);
  const SensingParams sp = params_for(pose);
  const double base = crb_phi_closed_form(part, r_x, sp, g);

  // Find the subsection with the largest bracket contribution and add
  // power along its steering vector; the CRB must not increase.
  std::vector<CrbTermK> terms;
  crb_phi_closed_form(part, r_x, sp, g, &terms);
  int dominant = 0;
  for (std::size_t k = 1; k < terms.size(); ++k)
    if (terms[k].l_k * terms[k].bracket >
        terms[dominant].l_k * terms[dominant].bracket)
      dominant = static_cast<int>(k);
  const VecC a = steer_tx(g, part.subsections[dominant].phi_k);
  double prev = base;
  for (const double wgt : {0.1, 0.3, 1.0, 3.0}) {
    const MatC boosted = r_x + wgt * (a * a.adjoint());
    const double crb = crb_phi_closed_form(part, boosted, sp, g);
    CHECK(crb <= prev * (1.0 + 1e-12));
    prev = crb;
  }
}

TEST_CASE("degeneracy and singularity errors") {
  const ArrayGeometry g{8, 8};
  TargetPose pose = default_pose();
  const LosPartition part = make_point_partition(pose, 1.0);
  const SensingParams sp = params_for(pose);

  // A beam orthogonal to a(phi_1) puts exactly zero power on the target.
  const VecC da = steer_tx_deriv(g, pose.phi_o);
  const MatC r_orth = da * da.adjoint();
  CHECK_THROWS_AS(crb_phi_closed_form(part, r_orth, sp, g), Error);

  FimBlocks zero_gain;
  zero_gain.i_g = 0.0;
  CHECK_THROWS_AS(efim_schur(zero_gain), Error);

  // K=1 with a non-degenerate contour leaves the pose unidentifiable in a
  // direction that couples into phi_o: the oracle must refuse.
  const ContourModel c = default_contour();
  const LosPartition one = compute_los_partition(c, pose, 1);
  Rng rng(17u);
  const MatC r_x = random_covariance(rng, 8, 1.0);
  CHECK_THROWS_AS(crb_phi_oracle(one, pose, c, r_x, sp, g,
                                 JacobianMode::kExact),
                  Error);
}
