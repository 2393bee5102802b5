// Copyright 2026 The softstride Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "softstride/error.h"
#include "softstride/harness.h"

namespace softstride {
namespace {

void CheckKeys(const YAML::Node& node, const std::string& section,
               const std::set<std::string>& allowed) {
  if (!node) return;
  if (!node.IsMap()) {
    throw Error(ErrorCode::kSchemaMismatch, section + " must be a mapping");
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "unknown key '" + key + "' in " + section);
    }
  }
}

template <typename T>
void Get(const YAML::Node& node, const char* key, T* out) {
  if (node && node[key]) *out = node[key].as<T>();
}

void GetVec3(const YAML::Node& node, const char* key, Vec3* out) {
  if (!node || !node[key]) return;
  const YAML::Node v = node[key];
  if (v.IsScalar()) {
    *out = Vec3::Constant(v.as<double>());
    return;
  }
  if (!v.IsSequence() || v.size() != 3) {
    throw Error(ErrorCode::kSchemaMismatch, std::string(key) + " needs 3 values");
  }
  for (int i = 0; i < 3; ++i) (*out)[i] = v[i].as<double>();
}

void GetArray3(const YAML::Node& node, const char* key,
               std::array<double, 3>* out) {
  Vec3 v(out->at(0), out->at(1), out->at(2));
  GetVec3(node, key, &v);
  for (int i = 0; i < 3; ++i) (*out)[i] = v[i];
}

ExperimentConfig FromYaml(const YAML::Node& root) {
  ExperimentConfig cfg;
  CheckKeys(root, "config",
            {"scenario", "robot", "terrain", "gait", "controller",
             "attitude_motion", "noise", "detector", "observer", "fusion",
             "replay", "metrics", "sweep"});

  ScenarioConfig& sc = cfg.scenario;
  const YAML::Node scn = root["scenario"];
  CheckKeys(scn, "scenario",
            {"duration", "dt", "seed", "mcs_rate", "mcs_noise"});
  Get(scn, "duration", &sc.duration);
  Get(scn, "dt", &sc.dt);
  Get(scn, "seed", &sc.seed);
  Get(scn, "mcs_rate", &sc.mcs_rate);
  Get(scn, "mcs_noise", &sc.mcs_noise);

  RobotParams& rp = sc.model.robot;
  const YAML::Node rob = root["robot"];
  CheckKeys(rob, "robot",
            {"trunk_mass", "trunk_com_offset", "link_lengths", "link_masses",
             "gravity", "coriolis_terms", "hip_x", "hip_y"});
  Get(rob, "trunk_mass", &rp.trunk_mass);
  GetVec3(rob, "trunk_com_offset", &rp.trunk_com_offset);
  GetArray3(rob, "link_lengths", &rp.link_lengths);
  GetArray3(rob, "link_masses", &rp.link_masses);
  Get(rob, "gravity", &rp.gravity_magnitude);
  Get(rob, "coriolis_terms", &rp.coriolis_terms);
  if (rob && (rob["hip_x"] || rob["hip_y"])) {
    double hx = rp.hip_positions[0].x(), hy = rp.hip_positions[0].y();
    Get(rob, "hip_x", &hx);
    Get(rob, "hip_y", &hy);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      rp.hip_positions[leg] = Vec3(LegFore(leg) * hx, LegSide(leg) * hy, 0.0);
    }
  }
  sc.model.gravity_n = Vec3(0.0, 0.0, -rp.gravity_magnitude);

  const YAML::Node ter = root["terrain"];
  CheckKeys(ter, "terrain",
            {"kind", "k", "d", "size", "thickness", "viscous_friction",
             "friction_coefficient"});
  std::string kind = "rigid";
  Get(ter, "kind", &kind);
  if (kind == "soft") {
    double k = 2400.0, d = 50.0, thickness = 0.2;
    std::vector<double> size = {1.6, 1.2};
    Get(ter, "k", &k);
    Get(ter, "d", &d);
    Get(ter, "thickness", &thickness);
    Get(ter, "size", &size);
    if (size.size() != 2) {
      throw Error(ErrorCode::kSchemaMismatch, "terrain.size needs 2 values");
    }
    sc.model.terrain = TerrainModel::Soft(k, d, size[0], size[1], thickness);
  } else if (kind == "rigid") {
    sc.model.terrain = TerrainModel::Rigid();
  } else {
    throw Error(ErrorCode::kSchemaMismatch, "terrain.kind must be rigid|soft");
  }
  Get(ter, "viscous_friction", &sc.model.terrain.viscous_friction);
  Get(ter, "friction_coefficient", &sc.model.terrain.friction_coefficient);

  const YAML::Node gait = root["gait"];
  CheckKeys(gait, "gait",
            {"period", "duty_factor", "step_height", "step_length"});
  Get(gait, "period", &sc.model.gait.period);
  Get(gait, "duty_factor", &sc.model.gait.duty_factor);
  Get(gait, "step_height", &sc.model.gait.step_height);
  Get(gait, "step_length", &sc.model.gait.step_length);

  ControllerGains& cg = sc.model.controller;
  const YAML::Node ctl = root["controller"];
  CheckKeys(ctl, "controller",
            {"nominal_height", "tracking_time_constant", "kp_height",
             "ki_height", "kd_height", "min_extension", "max_extension",
             "unload_admittance", "unload_time", "push_speed", "push_accel",
             "touchdown_clearance"});
  Get(ctl, "nominal_height", &cg.nominal_height);
  Get(ctl, "tracking_time_constant", &cg.tracking_time_constant);
  Get(ctl, "kp_height", &cg.kp_height);
  Get(ctl, "ki_height", &cg.ki_height);
  Get(ctl, "kd_height", &cg.kd_height);
  Get(ctl, "min_extension", &cg.min_extension);
  Get(ctl, "max_extension", &cg.max_extension);
  Get(ctl, "unload_admittance", &cg.unload_admittance);
  Get(ctl, "unload_time", &cg.unload_time);
  Get(ctl, "push_speed", &cg.push_speed);
  Get(ctl, "push_accel", &cg.push_accel);
  Get(ctl, "touchdown_clearance", &cg.touchdown_clearance);

  const YAML::Node am = root["attitude_motion"];
  CheckKeys(am, "attitude_motion", {"amplitude", "frequency", "phase"});
  GetVec3(am, "amplitude", &sc.model.attitude.amplitude);
  GetVec3(am, "frequency", &sc.model.attitude.frequency);
  GetVec3(am, "phase", &sc.model.attitude.phase);

  SensorNoiseParams& np = sc.noise;
  const YAML::Node noise = root["noise"];
  CheckKeys(noise, "noise",
            {"accel_bias", "accel_noise_density", "gyro_bias",
             "gyro_noise_density", "encoder_resolution", "torque_noise",
             "sample_rate"});
  GetVec3(noise, "accel_bias", &np.accel_bias);
  Get(noise, "accel_noise_density", &np.accel_noise_density);
  GetVec3(noise, "gyro_bias", &np.gyro_bias);
  Get(noise, "gyro_noise_density", &np.gyro_noise_density);
  Get(noise, "encoder_resolution", &np.encoder_resolution);
  Get(noise, "torque_noise", &np.torque_noise);
  Get(noise, "sample_rate", &np.sample_rate);

  EstimatorConfig& ec = cfg.replay.estimator;
  ec.robot = rp;
  const YAML::Node det = root["detector"];
  CheckKeys(det, "detector", {"epsilon", "hysteresis_band", "mode"});
  Get(det, "epsilon", &ec.detector.epsilon);
  Get(det, "hysteresis_band", &ec.detector.hysteresis_band);
  std::string mode = "plain";
  Get(det, "mode", &mode);
  if (mode == "plain") {
    ec.detector.mode = ContactDetectorConfig::Mode::kPlain;
  } else if (mode == "schmitt") {
    ec.detector.mode = ContactDetectorConfig::Mode::kSchmitt;
  } else {
    throw Error(ErrorCode::kSchemaMismatch, "detector.mode must be plain|schmitt");
  }

  const YAML::Node obs = root["observer"];
  CheckKeys(obs, "observer",
            {"kp", "k", "sigma", "m_b", "use_xkf", "xkf_q_attitude",
             "xkf_q_bias", "xkf_r", "accel_gate"});
  if (obs && obs["kp"]) ec.nlo.k_p = Mat3::Identity() * obs["kp"].as<double>();
  Get(obs, "k", &ec.nlo.k);
  Get(obs, "sigma", &ec.nlo.sigma);
  Get(obs, "m_b", &ec.nlo.m_b);
  Get(obs, "use_xkf", &ec.use_xkf);
  if (obs && obs["xkf_q_attitude"]) {
    ec.xkf_q.block<3, 3>(0, 0) =
        Mat3::Identity() * obs["xkf_q_attitude"].as<double>();
  }
  if (obs && obs["xkf_q_bias"]) {
    ec.xkf_q.block<3, 3>(3, 3) = Mat3::Identity() * obs["xkf_q_bias"].as<double>();
  }
  if (obs && obs["xkf_r"]) ec.xkf_r = Mat3::Identity() * obs["xkf_r"].as<double>();
  Get(obs, "accel_gate", &ec.accel_gate);

  const YAML::Node fus = root["fusion"];
  CheckKeys(fus, "fusion", {"q_position", "q_velocity", "r_velocity"});
  if (fus && fus["q_position"]) {
    ec.fusion.q.block<3, 3>(0, 0) =
        Mat3::Identity() * fus["q_position"].as<double>();
  }
  if (fus && fus["q_velocity"]) {
    ec.fusion.q.block<3, 3>(3, 3) =
        Mat3::Identity() * fus["q_velocity"].as<double>();
  }
  if (fus && fus["r_velocity"]) {
    ec.fusion.r_meas = Mat3::Identity() * fus["r_velocity"].as<double>();
  }
  ec.fusion.g_n = sc.model.gravity_n;

  const YAML::Node rep = root["replay"];
  CheckKeys(rep, "replay", {"grf_noise_sigma"});
  Get(rep, "grf_noise_sigma", &cfg.replay.grf_noise_sigma);
  cfg.replay.seed = sc.seed;

  const YAML::Node met = root["metrics"];
  CheckKeys(met, "metrics", {"rise_onset", "skip"});
  Get(met, "rise_onset", &cfg.metrics.rise_onset);
  Get(met, "skip", &cfg.metrics.skip);

  const YAML::Node sw = root["sweep"];
  CheckKeys(sw, "sweep", {"epsilons", "workers"});
  Get(sw, "epsilons", &cfg.sweep_epsilons);
  Get(sw, "workers", &cfg.workers);

  rp.Validate();
  sc.model.terrain.Validate();
  sc.model.gait.Validate();
  np.Validate();
  ec.detector.Validate();
  ec.nlo.Validate();
  ec.fusion.Validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  try {
    return FromYaml(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, e.what(), e.mark.line + 1);
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace softstride
