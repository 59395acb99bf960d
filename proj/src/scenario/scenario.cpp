// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// scenario.cpp: experiment configuration, its JSON round-trip, and sweeps.

#include "scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace isac {

using nlohmann::json;

namespace {

/// Wraps field access so every type error names the offending key.
template <typename T>
void read_field(const json& section, const char* key, T* out) {
  if (!section.contains(key)) return;
  try {
    *out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kBadInput,
         std::string("scenario field '") + key + "': " + e.what());
  }
}

/// Rejects keys outside the known set, so typos cannot silently fall back
/// to defaults.
void check_keys(const json& section, const char* name,
                std::initializer_list<const char*> known) {
  if (section.is_null()) return;
  require(section.is_object(),
          std::string("scenario section '") + name + "' must be an object");
  for (const auto& item : section.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok)
      fail(ErrorCode::kBadInput, std::string("unknown scenario key '") +
                                     item.key() + "' in section '" + name +
                                     "'");
  }
}

}  // namespace

void Scenario::validate() const {
  array().validate();
  require(static_cast<int>(users.angles_deg.size()) <= geometry.n_t,
          "more users than transmit antennas");
  for (double a : users.angles_deg)
    require(a > -90.0 && a < 90.0, "user angles must lie in (-90, 90) deg");
  require(users.channel == "los" || users.channel == "multipath",
          "channel must be 'los' or 'multipath'");
  require(users.channel_gain > 0.0, "channel gain must be positive");
  require(users.multipath_paths >= 0, "multipath paths must be >= 0");
  require(users.multipath_decay > 0.0 && users.multipath_decay <= 1.0,
          "multipath decay must be in (0, 1]");

  require(sensing.k_subsections >= 1, "need at least one subsection");
  require(sensing.phi_o_deg > -90.0 && sensing.phi_o_deg < 90.0,
          "target direction must lie in (-90, 90) deg");
  const ContourModel model = contour();
  model.validate();
  pose().validate(model);
  require(sensing.t_s_s > 0.0, "observation period must be positive");
  require(sensing.bandwidth_hz > 0.0, "bandwidth must be positive");

  variant();  // throws on an unknown name
  require(design.epochs >= 1, "need at least one randomization epoch");
  require(design.tolerance > 0.0, "solver tolerance must be positive");

  sim_config().validate();
  require(sim.runs >= 1, "need at least one Monte-Carlo run");
  grid().validate();
}

ContourModel Scenario::contour() const {
  require(static_cast<int>(sensing.contour_cos_m.size()) ==
                  sensing.q_harmonics &&
              static_cast<int>(sensing.contour_sin_m.size()) ==
                  sensing.q_harmonics,
          "contour coefficient lists must both have q_harmonics entries");
  ContourModel c;
  c.Q = sensing.q_harmonics;
  c.m = Eigen::Map<const VecD>(sensing.contour_cos_m.data(), c.Q);
  c.n = Eigen::Map<const VecD>(sensing.contour_sin_m.data(), c.Q);
  return c;
}

TargetPose Scenario::pose() const {
  TargetPose p;
  p.d_o = sensing.d_o_m;
  p.phi_o = deg2rad(sensing.phi_o_deg);
  p.varphi = deg2rad(sensing.varphi_deg);
  return p;
}

SensingParams Scenario::sensing_params() const {
  SensingParams p;
  p.g = 1.0 / (sensing.d_o_m * sensing.d_o_m);
  p.sigma_s2 = dbm2watt(sensing.noise_dbm);
  p.t_s = sensing.t_s_s;
  p.B = sensing.bandwidth_hz;
  return p;
}

std::vector<double> Scenario::user_angles_rad() const {
  std::vector<double> out;
  out.reserve(users.angles_deg.size());
  for (double a : users.angles_deg) out.push_back(deg2rad(a));
  return out;
}

ChannelModelSpec Scenario::channel_spec() const {
  ChannelModelSpec spec;
  spec.kind = users.channel == "multipath" ? ChannelModelSpec::Kind::kMultipath
                                           : ChannelModelSpec::Kind::kLosOnly;
  spec.gain = users.channel_gain;
  spec.paths = users.multipath_paths;
  spec.decay = users.multipath_decay;
  return spec;
}

DesignVariant Scenario::variant() const {
  if (design.variant == "crb-min") return DesignVariant::kCrbMin;
  if (design.variant == "bp1") return DesignVariant::kBp1;
  if (design.variant == "bp2") return DesignVariant::kBp2;
  fail(ErrorCode::kBadInput,
       "unknown design variant '" + design.variant +
           "' (expected crb-min, bp1, or bp2)");
}

SimConfig Scenario::sim_config() const {
  SimConfig cfg;
  cfg.sample_rate = sim.sample_rate_hz;
  cfg.num_samples = sim.num_samples;
  cfg.seed = design.seed;
  return cfg;
}

DirectionGrid Scenario::grid() const {
  DirectionGrid g;
  g.lo = deg2rad(sim.grid_lo_deg);
  g.hi = deg2rad(sim.grid_hi_deg);
  g.step = deg2rad(sim.grid_step_deg);
  return g;
}

void SweepSpec::validate(const Scenario& base) const {
  require(axis == "N_t" || axis == "C" || axis == "Gamma_dB" ||
              axis == "P_t_dBW",
          "sweep axis must be one of N_t, C, Gamma_dB, P_t_dBW");
  require(!values.empty(), "sweep needs at least one value");
  require(!variants.empty(), "sweep needs at least one variant");
  for (const std::string& v : variants) {
    Scenario probe = base;
    probe.design.variant = v;
    probe.variant();  // throws on an unknown name
  }
  for (double v : values) {
    if (axis == "N_t") {
      require(v >= 1.0 && v == std::floor(v),
              "N_t sweep values must be positive integers");
      require(static_cast<int>(base.users.angles_deg.size()) <=
                  static_cast<int>(v),
              "N_t sweep value smaller than the user count");
    } else if (axis == "C") {
      require(v >= 0.0 && v == std::floor(v),
              "C sweep values must be nonnegative integers");
      require(v <= base.geometry.n_t, "C sweep value exceeds N_t");
    }
  }
}

std::vector<double> default_sweep_values(const std::string& axis) {
  if (axis == "N_t") return {12, 14, 16, 18, 20};
  if (axis == "C") return {2, 3, 4, 5};
  if (axis == "Gamma_dB") return {4, 6, 8, 10, 12};
  if (axis == "P_t_dBW") return {-4, -2, 0, 2, 4};
  fail(ErrorCode::kBadInput, "unknown sweep axis '" + axis + "'");
}

Scenario scenario_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kBadInput, std::string("scenario JSON: ") + e.what());
  }
  require(root.is_object(), "scenario JSON must be an object");
  check_keys(root, "(top level)",
             {"geometry", "power", "users", "sensing", "design", "sim"});

  Scenario s;
  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    check_keys(g, "geometry", {"n_t", "n_r"});
    read_field(g, "n_t", &s.geometry.n_t);
    read_field(g, "n_r", &s.geometry.n_r);
  }
  if (root.contains("power")) {
    const json& p = root["power"];
    check_keys(p, "power", {"pt_dbw"});
    read_field(p, "pt_dbw", &s.pt_dbw);
  }
  if (root.contains("users")) {
    const json& u = root["users"];
    check_keys(u, "users",
               {"angles_deg", "gamma_db", "noise_dbm", "channel",
                "channel_gain", "multipath_paths", "multipath_decay"});
    read_field(u, "angles_deg", &s.users.angles_deg);
    read_field(u, "gamma_db", &s.users.gamma_db);
    read_field(u, "noise_dbm", &s.users.noise_dbm);
    read_field(u, "channel", &s.users.channel);
    read_field(u, "channel_gain", &s.users.channel_gain);
    read_field(u, "multipath_paths", &s.users.multipath_paths);
    read_field(u, "multipath_decay", &s.users.multipath_decay);
  }
  if (root.contains("sensing")) {
    const json& e = root["sensing"];
    check_keys(e, "sensing",
               {"d_o_m", "phi_o_deg", "varphi_deg", "k_subsections",
                "q_harmonics", "contour_cos_m", "contour_sin_m", "t_s_s",
                "noise_dbm", "bandwidth_hz"});
    read_field(e, "d_o_m", &s.sensing.d_o_m);
    read_field(e, "phi_o_deg", &s.sensing.phi_o_deg);
    read_field(e, "varphi_deg", &s.sensing.varphi_deg);
    read_field(e, "k_subsections", &s.sensing.k_subsections);
    read_field(e, "q_harmonics", &s.sensing.q_harmonics);
    read_field(e, "contour_cos_m", &s.sensing.contour_cos_m);
    read_field(e, "contour_sin_m", &s.sensing.contour_sin_m);
    read_field(e, "t_s_s", &s.sensing.t_s_s);
    read_field(e, "noise_dbm", &s.sensing.noise_dbm);
    read_field(e, "bandwidth_hz", &s.sensing.bandwidth_hz);
  }
  if (root.contains("design")) {
    const json& d = root["design"];
    check_keys(d, "design",
               {"variant", "epochs", "seed", "tolerance", "coverage",
                "rescale_to_full_power"});
    read_field(d, "variant", &s.design.variant);
    read_field(d, "epochs", &s.design.epochs);
    read_field(d, "seed", &s.design.seed);
    read_field(d, "tolerance", &s.design.tolerance);
    read_field(d, "coverage", &s.design.coverage);
    read_field(d, "rescale_to_full_power", &s.design.rescale_to_full_power);
  }
  if (root.contains("sim")) {
    const json& m = root["sim"];
    check_keys(m, "sim",
               {"sample_rate_hz", "num_samples", "runs", "grid_lo_deg",
                "grid_hi_deg", "grid_step_deg"});
    read_field(m, "sample_rate_hz", &s.sim.sample_rate_hz);
    read_field(m, "num_samples", &s.sim.num_samples);
    read_field(m, "runs", &s.sim.runs);
    read_field(m, "grid_lo_deg", &s.sim.grid_lo_deg);
    read_field(m, "grid_hi_deg", &s.sim.grid_hi_deg);
    read_field(m, "grid_step_deg", &s.sim.grid_step_deg);
  }
  s.validate();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["geometry"] = {{"n_t", s.geometry.n_t}, {"n_r", s.geometry.n_r}};
  root["power"] = {{"pt_dbw", s.pt_dbw}};
  root["users"] = {{"angles_deg", s.users.angles_deg},
                   {"gamma_db", s.users.gamma_db},
                   {"noise_dbm", s.users.noise_dbm},
                   {"channel", s.users.channel},
                   {"channel_gain", s.users.channel_gain},
                   {"multipath_paths", s.users.multipath_paths},
                   {"multipath_decay", s.users.multipath_decay}};
  root["sensing"] = {{"d_o_m", s.sensing.d_o_m},
                     {"phi_o_deg", s.sensing.phi_o_deg},
                     {"varphi_deg", s.sensing.varphi_deg},
                     {"k_subsections", s.sensing.k_subsections},
                     {"q_harmonics", s.sensing.q_harmonics},
                     {"contour_cos_m", s.sensing.contour_cos_m},
                     {"contour_sin_m", s.sensing.contour_sin_m},
                     {"t_s_s", s.sensing.t_s_s},
                     {"noise_dbm", s.sensing.noise_dbm},
                     {"bandwidth_hz", s.sensing.bandwidth_hz}};
  root["design"] = {{"variant", s.design.variant},
                    {"epochs", s.design.epochs},
                    {"seed", s.design.seed},
                    {"tolerance", s.design.tolerance},
                    {"coverage", s.design.coverage},
                    {"rescale_to_full_power", s.design.rescale_to_full_power}};
  root["sim"] = {{"sample_rate_hz", s.sim.sample_rate_hz},
                 {"num_samples", s.sim.num_samples},
                 {"runs", s.sim.runs},
                 {"grid_lo_deg", s.sim.grid_lo_deg},
                 {"grid_hi_deg", s.sim.grid_hi_deg},
                 {"grid_step_deg", s.sim.grid_step_deg}};
  return root.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kBadInput, "cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace isac
