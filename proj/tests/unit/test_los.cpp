// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// test_los.cpp: line-of-sight determination and partition quality.

#include <doctest.h>

#include <cmath>

#include "core/los.hpp"
#include "fixtures.hpp"
#include "support/oracles.hpp"

using namespace isac;
using namespace isac::testing;

TEST_CASE("circle visible arc matches brute-force oracle and geometry") {
  const ContourModel circle = unit_circle();
  const TargetPose pose = default_pose();  // d_o = 27
  const LosPartition part = compute_los_partition(circle, pose, 4);

  // Analytic truth: the visible arc of a unit circle seen from range d
  // subtends 2*acos(r/d) at the center.
  const double analytic = 2.0 * std::acos(1.0 / 27.0);
  const double lib = part.total_arc_length();
  CHECK(lib == doctest::Approx(analytic).epsilon(1e-4));

  const double oracle = ray_cast_visible_arclength(circle, pose, 100000);
  CHECK(lib == doctest::Approx(oracle).epsilon(1e-3));

  CHECK(part.subsections.size() == 4);
  CHECK(part.contiguous);
}

TEST_CASE("circle subsection bearings are symmetric about phi_o") {
  const ContourModel circle = unit_circle();
  TargetPose pose = default_pose();
  pose.phi_o = 0.2;
  const LosPartition part = compute_los_partition(circle, pose, 6);
  const int k_count = static_cast<int>(part.subsections.size());
  for (int k = 0; k < k_count / 2; ++k) {
    const double lo = part.subsections[k].phi_k - pose.phi_o;
    const double hi = part.subsections[k_count - 1 - k].phi_k - pose.phi_o;
    CHECK(std::abs(lo + hi) < 1e-3);
  }
}

TEST_CASE("default contour partition basic properties") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const LosPartition part = compute_los_partition(c, pose, 8);
  CHECK(part.subsections.size() == 8);

  const double r_max = c.max_radius();
  for (const auto& s : part.subsections) {
    CHECK(s.d_k > pose.d_o - r_max - 1e-9);
    CHECK(s.d_k < pose.d_o + r_max + 1e-9);
    CHECK(s.l_k >= 0.0);
    // p_k must be the posed r_k.
    const Vec2 expect = pose.center() + pose.rotation() * s.r_k;
    CHECK((s.p_k - expect).norm() < 1e-12 * pose.d_o);
    CHECK(s.d_k == doctest::Approx(s.p_k.norm()));
    CHECK(s.phi_k == doctest::Approx(bearing(s.p_k)));
  }

  // Representative directions are ordered and interior to the interval.
  for (std::size_t k = 1; k < part.subsections.size(); ++k)
    CHECK(part.subsections[k - 1].u_k < part.subsections[k].u_k);
  CHECK(part.subsections.front().u_k > part.u_lower);
  CHECK(part.subsections.back().u_k < part.u_upper);
}

TEST_CASE("partition arc lengths sum to the direct quadrature") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const LosPartition part = compute_los_partition(c, pose, 8);
  const double direct = arc_length(c, part.u_lower, part.u_upper);
  CHECK(part.total_arc_length() ==
        doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("partition is stable under sampling refinement") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const LosPartition coarse = compute_los_partition(c, pose, 8, 4096);
  const LosPartition fine = compute_los_partition(c, pose, 8, 8192);
  REQUIRE(coarse.subsections.size() == fine.subsections.size());
  for (std::size_t k = 0; k < coarse.subsections.size(); ++k) {
    CHECK(coarse.subsections[k].l_k ==
          doctest::Approx(fine.subsections[k].l_k).epsilon(1e-4));
  }
}

TEST_CASE("default contour against the brute-force oracle") {
  const ContourModel c = default_contour();
  const TargetPose pose = default_pose();
  const LosPartition part = compute_los_partition(c, pose, 8);
  const double oracle = ray_cast_visible_arclength(c, pose, 100000);
  CHECK(part.total_arc_length() == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("rotated and offset poses still agree with the oracle") {
  Rng rng(99u);
  for (int trial = 0; trial < 5; ++trial) {
    const ContourModel c = random_contour(rng);
    const TargetPose pose = random_pose(rng);
    const LosPartition part = compute_los_partition(c, pose, 5);
    const double oracle = ray_cast_visible_arclength(c, pose, 50000);
    // Random star-like contours stay single-component; tolerance covers the
    // oracle's Riemann-sum granularity.
    CHECK(part.total_arc_length() ==
          doctest::Approx(oracle).epsilon(2e-3));
  }
}

TEST_CASE("point-like target yields the full parameter circle") {
  ContourModel point;
  point.Q = 1;
  point.m = VecD::Zero(1);
  point.n = VecD::Zero(1);
  const TargetPose pose = default_pose();
  const LosPartition part = compute_los_partition(point, pose, 3);
  CHECK(part.subsections.size() == 3);
  CHECK(part.u_upper - part.u_lower == doctest::Approx(2.0 * kPi));
  CHECK(part.total_arc_length() == doctest::Approx(0.0));
}

TEST_CASE("argument validation") {
  const ContourModel c = unit_circle();
  const TargetPose pose = default_pose();
  CHECK_THROWS_AS(compute_los_partition(c, pose, 0), Error);
  CHECK_THROWS_AS(compute_los_partition(c, pose, 4, 100), Error);
}
