// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// test_scenario.cpp: configuration defaults, JSON round-trips, strict
// parsing, and unit conversions.

#include <doctest.h>

#include <cmath>

#include "scenario/scenario.hpp"

using namespace isac;

TEST_SUITE("scenario") {

TEST_CASE("defaults embody the evaluation setup") {
  const Scenario s;
  s.validate();
  CHECK(s.geometry.n_t == 16);
  CHECK(s.geometry.n_r == 16);
  CHECK(s.pt_dbw == 0.0);
  REQUIRE(s.users.angles_deg.size() == 4);
  CHECK(s.users.angles_deg[0] == -60.0);
  CHECK(s.users.angles_deg[1] == -35.0);
  CHECK(s.users.angles_deg[2] == 35.0);
  CHECK(s.users.angles_deg[3] == 60.0);
  CHECK(s.users.gamma_db == 5.0);
  CHECK(s.users.noise_dbm == -80.0);
  CHECK(s.sensing.d_o_m == 27.0);
  CHECK(s.sensing.phi_o_deg == 0.0);
  CHECK(s.sensing.varphi_deg == 0.0);
  CHECK(s.sensing.k_subsections == 8);
  CHECK(s.sensing.q_harmonics == 8);
  CHECK(s.sensing.contour_cos_m[0] == 2.05);
  CHECK(s.sensing.contour_sin_m[2] == 0.335);
  CHECK(s.sensing.t_s_s == 1.0);
  CHECK(s.sensing.noise_dbm == -80.0);
  CHECK(s.sensing.bandwidth_hz == 1e8);
  CHECK(s.design.variant == "crb-min");
  CHECK(s.sim.sample_rate_hz == 4e8);
  CHECK(s.sim.num_samples == 256);
}

TEST_CASE("conversions happen once at the accessor boundary") {
  const Scenario s;
  CHECK(s.P_t() == doctest::Approx(1.0).epsilon(1e-15));          // 0 dBW
  CHECK(s.Gamma() == doctest::Approx(std::pow(10.0, 0.5)).epsilon(1e-15));
  CHECK(s.sigma_c2() == doctest::Approx(1e-11).epsilon(1e-12));   // -80 dBm
  CHECK(s.sensing_params().sigma_s2 ==
        doctest::Approx(1e-11).epsilon(1e-12));
  CHECK(s.sensing_params().g ==
        doctest::Approx(1.0 / (27.0 * 27.0)).epsilon(1e-15));
  CHECK(s.pose().phi_o == 0.0);
  CHECK(s.user_angles_rad()[2] == doctest::Approx(deg2rad(35.0)));
  CHECK(s.grid().step == doctest::Approx(deg2rad(0.05)));
}

TEST_CASE("json round trip is byte stable") {
  const Scenario def;
  const std::string once = scenario_to_json(def);
  const Scenario back = scenario_from_json(once);
  const std::string twice = scenario_to_json(back);
  CHECK(once == twice);

  // A lopsided scenario with awkward doubles survives as well.
  Scenario odd;
  odd.pt_dbw = 1.7320508075688772;
  odd.users.gamma_db = 4.999999999999999;
  odd.sensing.d_o_m = 33.123456789012345;
  odd.design.seed = 0xDEADBEEFCAFEBABEull;
  const std::string a = scenario_to_json(odd);
  const std::string b = scenario_to_json(scenario_from_json(a));
  CHECK(a == b);
}

TEST_CASE("absent sections keep their defaults") {
  const Scenario s = scenario_from_json("{\"geometry\": {\"n_t\": 12}}");
  CHECK(s.geometry.n_t == 12);
  CHECK(s.geometry.n_r == 16);       // untouched
  CHECK(s.users.gamma_db == 5.0);    // untouched section
  CHECK(s.sensing.d_o_m == 27.0);
}

TEST_CASE("unknown keys are rejected") {
  try {
    scenario_from_json("{\"geometry\": {\"n_tx\": 12}}");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadInput);
    CHECK(std::string(e.what()).find("n_tx") != std::string::npos);
  }
  CHECK_THROWS_AS(scenario_from_json("{\"geomtry\": {}}"), Error);
}

TEST_CASE("malformed values are rejected with context") {
  CHECK_THROWS_AS(scenario_from_json("not json"), Error);
  CHECK_THROWS_AS(scenario_from_json("[1,2,3]"), Error);
  try {
    scenario_from_json("{\"users\": {\"gamma_db\": \"five\"}}");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadInput);
    CHECK(std::string(e.what()).find("gamma_db") != std::string::npos);
  }
}

TEST_CASE("validation catches inconsistent scenarios") {
  Scenario s;
  s.sensing.q_harmonics = 5;  // contour lists still have 8 entries
  CHECK_THROWS_AS(s.validate(), Error);

  Scenario crowded;
  crowded.geometry.n_t = 3;  // fewer antennas than the four users
  CHECK_THROWS_AS(crowded.validate(), Error);

  Scenario inside;
  inside.sensing.d_o_m = 1.0;  // base station inside the contour
  CHECK_THROWS_AS(inside.validate(), Error);

  Scenario badvar;
  badvar.design.variant = "fancy";
  CHECK_THROWS_AS(badvar.validate(), Error);
}

TEST_CASE("sweep specs know their axes") {
  const Scenario base;
  SweepSpec sweep;
  sweep.axis = "N_t";
  sweep.values = default_sweep_values("N_t");
  sweep.validate(base);
  CHECK(sweep.values.size() == 5);
  CHECK(sweep.values.front() == 12);
  CHECK(sweep.values.back() == 20);

  SweepSpec bad = sweep;
  bad.axis = "frequency";
  CHECK_THROWS_AS(bad.validate(base), Error);

  SweepSpec tight = sweep;
  tight.values = {2};  // fewer antennas than users
  CHECK_THROWS_AS(tight.validate(base), Error);

  SweepSpec users_sweep;
  users_sweep.axis = "C";
  users_sweep.values = default_sweep_values("C");
  users_sweep.validate(base);
  CHECK(users_sweep.values == std::vector<double>{2, 3, 4, 5});
}

}  // TEST_SUITE
