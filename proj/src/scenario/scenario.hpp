// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// scenario.hpp: experiment configuration, its JSON round-trip, and sweeps.
//
// A Scenario stores exactly what the user wrote — dB quantities stay in dB,
// angles in degrees, with units spelled out in the field names — so that
// parse/serialize round-trips are byte-stable. Conversion to linear/SI
// happens exactly once, at the accessor boundary where the numerical
// modules consume the values. Default-constructed sections reproduce the
// built-in evaluation setup.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "../core/array.hpp"
#include "../core/contour.hpp"
#include "../core/crb.hpp"
#include "../design/sdr.hpp"
#include "../sim/echo.hpp"

namespace isac {

struct ScenarioGeometry {
  int n_t = 16;
  int n_r = 16;
};

struct ScenarioUsers {
  std::vector<double> angles_deg = {-60.0, -35.0, 35.0, 60.0};
  double gamma_db = 5.0;    ///< per-user SINR threshold
  double noise_dbm = -80.0; ///< downlink noise power
  std::string channel = "los";  ///< "los" or "multipath"
  double channel_gain = 1.0;
  int multipath_paths = 3;
  double multipath_decay = 0.5;
};

struct ScenarioSensing {
  double d_o_m = 27.0;
  double phi_o_deg = 0.0;
  double varphi_deg = 0.0;
  int k_subsections = 8;
  int q_harmonics = 8;
  std::vector<double> contour_cos_m = {2.05,  -0.002, 0.5,    0.0,
                                       0.056, 0.001,  -0.125, 0.003};
  std::vector<double> contour_sin_m = {1.24,  -0.001, 0.335, -0.001,
                                       0.124, -0.001, 0.018, 0.0};
  double t_s_s = 1.0;        ///< observation period used by the CRB
  double noise_dbm = -80.0;  ///< sensing noise power
  double bandwidth_hz = 1e8;
};

struct ScenarioDesign {
  std::string variant = "crb-min";  ///< "crb-min", "bp1", or "bp2"
  int epochs = 100;                 ///< randomization epochs
  std::uint64_t seed = 0;           ///< master seed for every derived stream
  double tolerance = 1e-8;          ///< solver tolerance
  bool coverage = true;             ///< enforce the 3-dB coverage band
  bool rescale_to_full_power = true;  ///< scale W up to the power cap
};

struct ScenarioSim {
  double sample_rate_hz = 4e8;
  int num_samples = 256;
  int runs = 200;
  double grid_lo_deg = -8.0;
  double grid_hi_deg = 8.0;
  double grid_step_deg = 0.05;
};

/// Complete experiment description with byte-stable JSON round-trips.
struct Scenario {
  ScenarioGeometry geometry;
  double pt_dbw = 0.0;  ///< total transmit power cap
  ScenarioUsers users;
  ScenarioSensing sensing;
  ScenarioDesign design;
  ScenarioSim sim;

  /// Throws kBadInput on out-of-range or inconsistent values.
  void validate() const;

  // ----- linear/SI views (the single conversion boundary) -----------------
  ArrayGeometry array() const { return ArrayGeometry{geometry.n_t, geometry.n_r}; }
  ContourModel contour() const;
  TargetPose pose() const;
  SensingParams sensing_params() const;
  double P_t() const { return dbw2watt(pt_dbw); }
  double Gamma() const { return db2lin(users.gamma_db); }
  double sigma_c2() const { return dbm2watt(users.noise_dbm); }
  std::vector<double> user_angles_rad() const;
  ChannelModelSpec channel_spec() const;
  DesignVariant variant() const;
  SimConfig sim_config() const;
  DirectionGrid grid() const;
};

/// Sweep description for the `sweep` subcommand.
struct SweepSpec {
  std::string axis;  ///< "N_t", "C", "Gamma_dB", or "P_t_dBW"
  std::vector<double> values;
  std::vector<std::string> variants = {"crb-min", "bp1", "bp2"};

  /// Throws kBadInput on an unknown axis, empty/invalid values, or values
  /// incompatible with the scenario (e.g. more users than antennas).
  void validate(const Scenario& base) const;
};

/// Built-in default values for each sweep axis.
std::vector<double> default_sweep_values(const std::string& axis);

/// Strict JSON parse: every present key must be known and well-typed
/// (unknown keys are rejected so typos cannot silently fall back to
/// defaults); absent keys keep their defaults. Throws kBadInput.
Scenario scenario_from_json(const std::string& text);

/// Two-space-indented JSON with every field present. Serialize-then-parse
/// reproduces the scenario exactly.
std::string scenario_to_json(const Scenario& s);

/// Reads and parses a scenario file. Throws kBadInput on IO failure.
Scenario load_scenario(const std::string& path);

}  // namespace isac
