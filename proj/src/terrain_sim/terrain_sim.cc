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

#include "softstride/terrain_sim.h"

#include <algorithm>
#include <cmath>

#include "softstride/error.h"

namespace softstride {
namespace {

// cubic Hermite segment and its derivative
void Hermite(double p0, double v0, double p1, double v1, double duration,
             double t, double* p, double* v) {
  const double s = t / duration;
  const double s2 = s * s, s3 = s2 * s;
  *p = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * duration * v0 +
       (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * duration * v1;
  *v = (6 * s2 - 6 * s) / duration * p0 + (3 * s2 - 4 * s + 1) * v0 +
       (-6 * s2 + 6 * s) / duration * p1 + (3 * s2 - 2 * s) * v1;
}

double StaticSink(const SimModel& model, const Vec3& foot_n, int n_legs) {
  const TerrainRegion& region = model.terrain.RegionAt(foot_n.x(), foot_n.y());
  return model.robot.trunk_mass * model.gravity_n.norm() / (n_legs * region.k);
}

}  // namespace

TerrainModel TerrainModel::Rigid() {
  TerrainModel t;
  t.regions.push_back(TerrainRegion{});
  return t;
}

TerrainModel TerrainModel::Soft(double k, double d, double size_x,
                                double size_y, double thickness) {
  TerrainModel t;
  TerrainRegion r;
  r.kind = TerrainRegion::Kind::kSoft;
  r.k = k;
  r.d = d;
  r.x_min = -0.5 * size_x;
  r.x_max = 0.5 * size_x;
  r.y_min = -0.5 * size_y;
  r.y_max = 0.5 * size_y;
  r.thickness = thickness;
  t.regions.push_back(r);
  return t;
}

const TerrainRegion& TerrainModel::RegionAt(double x, double y) const {
  for (const auto& r : regions) {
    if (r.Contains(x, y)) return r;
  }
  throw Error(ErrorCode::kOutOfRegion, "no terrain region under the foot");
}

void TerrainModel::Validate() const {
  bool ok = !regions.empty() && viscous_friction >= 0.0 &&
            friction_coefficient >= 0.0;
  for (size_t i = 0; i < regions.size(); ++i) {
    const auto& a = regions[i];
    ok = ok && a.k > 0.0 && a.d >= 0.0 && a.x_min < a.x_max &&
         a.y_min < a.y_max && a.thickness > 0.0;
    for (size_t j = i + 1; j < regions.size(); ++j) {
      const auto& b = regions[j];
      const bool overlap = a.x_min < b.x_max && b.x_min < a.x_max &&
                           a.y_min < b.y_max && b.y_min < a.y_max;
      ok = ok && !overlap;
    }
  }
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "invalid TerrainModel");
}

void GaitParams::Validate() const {
  if (!(period > 0.0) || !(duty_factor > 0.0 && duty_factor < 1.0) ||
      !(step_height >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid GaitParams");
  }
}

Vec3 AttitudeMotion::Rate(double t) const {
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    w[i] = amplitude[i] * std::sin(2.0 * M_PI * frequency[i] * t + phase[i]);
  }
  return w;
}

std::array<FootTarget, kNumLegs> trot_reference(double t,
                                                const GaitParams& gait,
                                                const RobotParams& params,
                                                double nominal_height) {
  return trot_reference(t, gait, params, nominal_height, nominal_height);
}

double gait_phase(double t, const GaitParams& gait, int leg) {
  double phase = std::fmod(t / gait.period + gait.phase_offset[leg], 1.0);
  if (phase < 0.0) phase += 1.0;
  return phase;
}

std::array<FootTarget, kNumLegs> trot_reference(double t,
                                                const GaitParams& gait,
                                                const RobotParams& params,
                                                double nominal_height,
                                                double stance_extension) {
  const double lift =
      gait.step_height + std::max(0.0, stance_extension - nominal_height);
  SwingProfile p;
  p.liftoff_z = -stance_extension;
  p.touchdown_z = -stance_extension;
  p.apex_z = -stance_extension + lift;
  std::array<SwingProfile, kNumLegs> swing;
  swing.fill(p);
  return trot_reference(t, gait, params, stance_extension, swing);
}

std::array<FootTarget, kNumLegs> trot_reference(
    double t, const GaitParams& gait, const RobotParams& params,
    double stance_extension, const std::array<SwingProfile, kNumLegs>& swing) {
  const double t_stance = gait.duty_factor * gait.period;
  const double t_swing = gait.period - t_stance;
  const double half = 0.5 * gait.step_length;
  const double vx = -gait.step_length / t_stance;

  std::array<FootTarget, kNumLegs> out;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 base = hfe_position(params, leg);
    const double phase = gait_phase(t, gait, leg);
    FootTarget& ft = out[leg];
    ft.position = Vec3(base.x(), base.y(), -stance_extension);
    ft.velocity.setZero();
    if (phase < gait.duty_factor) {
      const double tt = phase * gait.period;
      ft.stance = true;
      ft.position.x() += half + vx * tt;
      ft.velocity.x() = vx;
      continue;
    }
    const SwingProfile& sp = swing[leg];
    const double ts = (phase - gait.duty_factor) * gait.period;
    ft.stance = false;
    double px, pv;
    Hermite(-half, vx, half, vx, t_swing, ts, &px, &pv);
    ft.position.x() += px;
    ft.velocity.x() = pv;
    const double t_arc = t_swing - sp.unload_time;
    if (ts < sp.unload_time || t_arc <= 0.0) {
      ft.position.z() = sp.liftoff_z;
      continue;
    }
    const double s = (ts - sp.unload_time) / t_arc;
    const double h = s * s * (3.0 - 2.0 * s);
    const double dh = 6.0 * s * (1.0 - s) / t_arc;
    const double extra = sp.apex_z - 0.5 * (sp.liftoff_z + sp.touchdown_z);
    const double bump = 0.5 * (1.0 - std::cos(2.0 * M_PI * s));
    const double dbump = M_PI * std::sin(2.0 * M_PI * s) / t_arc;
    ft.position.z() = (1.0 - h) * sp.liftoff_z + h * sp.touchdown_z + extra * bump;
    ft.velocity.z() = dh * (sp.touchdown_z - sp.liftoff_z) + extra * dbump;
  }
  return out;
}

Vec3 contact_force(const Vec3& foot_pos_n, const Vec3& foot_vel_n,
                   const TerrainModel& terrain) {
  const TerrainRegion& region = terrain.RegionAt(foot_pos_n.x(), foot_pos_n.y());
  const double pen = region.surface_height - foot_pos_n.z();
  if (pen <= 0.0) return Vec3::Zero();
  const double rate = -foot_vel_n.z();
  double fz = region.k * pen + region.d * rate;
  if (region.kind == TerrainRegion::Kind::kSoft && pen > region.thickness) {
    fz += kRigidStiffness * (pen - region.thickness) + kRigidDamping * rate;
  }
  fz = std::max(0.0, fz);
  Vec3 f(-terrain.viscous_friction * foot_vel_n.x(),
         -terrain.viscous_friction * foot_vel_n.y(), 0.0);
  const double ft = f.norm();
  const double cap = terrain.friction_coefficient * fz;
  if (ft > cap) f *= (ft > 0.0 ? cap / ft : 0.0);
  f.z() = fz;
  return f;
}

SimState InitialSimState(const SimModel& model) {
  SimState s;
  const ControllerGains& c = model.controller;
  const double surface =
      model.terrain.RegionAt(0.0, 0.0).surface_height;
  s.x = Vec3(0.0, 0.0, surface + c.nominal_height);
  const auto ref = trot_reference(0.0, model.gait, model.robot,
                                  c.nominal_height);
  double sink2 = 0.0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 foot_n = s.x + ref[leg].position;
    const double sink4 = StaticSink(model, foot_n, kNumLegs);
    sink2 = std::max(sink2, StaticSink(model, foot_n, 2));
    s.foot_b[leg] = Vec3(ref[leg].position.x(), ref[leg].position.y(),
                         -(c.nominal_height + sink4));
    s.foot_b_dot[leg].setZero();
    s.foot_n[leg] = s.x + s.foot_b[leg];
    s.force_n[leg].setZero();
    s.legs[leg].q = leg_inverse_kinematics(model.robot, leg, s.foot_b[leg]);
    s.z_cmd[leg] = s.foot_b[leg].z();
    s.liftoff_z[leg] = s.foot_b[leg].z();
    s.stance_ref[leg] = gait_phase(0.0, model.gait, leg) < model.gait.duty_factor;
  }
  s.stance_extension = c.nominal_height + (model.gait_enabled ? sink2 : 0.0);
  s.height_integral =
      c.ki_height > 0.0 ? (s.stance_extension - c.nominal_height) / c.ki_height
                        : 0.0;
  s.r_step = s.r;
  return s;
}

SimState step_dynamics(const SimState& state, const SimModel& model,
                       double dt) {
  if (!(dt > 0.0 && dt <= 1e-3 + 1e-15)) {
    throw Error(ErrorCode::kInvalidArgument, "step_dynamics needs dt <= 1 ms");
  }
  const ControllerGains& c = model.controller;
  SimState s = state;
  const double t = state.t;
  const Vec3 omega = model.attitude.Rate(t);

  // stance extension from trunk height error
  const double surface =
      model.terrain.RegionAt(state.x.x(), state.x.y()).surface_height;
  const double err = c.nominal_height - (state.x.z() - surface);
  double integral = state.height_integral + err * dt;
  double ext = c.nominal_height + c.kp_height * err + c.ki_height * integral -
               c.kd_height * state.v.z();
  if (ext > c.max_extension || ext < c.min_extension) {
    integral = state.height_integral;
    ext = std::clamp(ext, c.min_extension, c.max_extension);
  }
  if (!model.gait_enabled) ext = state.stance_extension;
  s.height_integral = integral;
  s.stance_extension = ext;

  // level frame: yaw-aligned, gravity-up, origin at the trunk
  const double yaw = std::atan2(state.r(1, 0), state.r(0, 0));
  const Mat3 level_to_b =
      state.r.transpose() *
      Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  const double surface_z = surface - state.x.z();

  std::array<SwingProfile, kNumLegs> swing;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const double phase = gait_phase(t, model.gait, leg);
    const bool stance = phase < model.gait.duty_factor;
    if (!stance && state.stance_ref[leg]) {
      s.liftoff_z[leg] = state.z_cmd[leg];
    }
    const double ts = (phase - model.gait.duty_factor) * model.gait.period;
    if (!stance && ts < c.unload_time) {
      // admittance unloading before the swing arc
      const double fz = std::max(0.0, state.force_n[leg].z());
      s.liftoff_z[leg] += fz / c.unload_admittance * dt;
    }
    swing[leg].liftoff_z = s.liftoff_z[leg];
    swing[leg].touchdown_z = surface_z + c.touchdown_clearance;
    swing[leg].apex_z = surface_z + model.gait.step_height;
    swing[leg].unload_time = c.unload_time;
  }
  const auto ref = trot_reference(t, model.gait, model.robot, ext, swing);
  const double decay = std::exp(-dt / c.tracking_time_constant);

  Vec3 total_force = Vec3::Zero();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    double z = ref[leg].position.z();
    double z_dot = ref[leg].velocity.z();
    if (ref[leg].stance) {
      // acceleration- and speed-limited approach to the stance extension
      const double e = z - state.z_cmd[leg];
      const double v_goal = std::copysign(
          std::min(c.push_speed, std::sqrt(2.0 * c.push_accel * std::abs(e))), e);
      const double dv = c.push_accel * dt;
      z_dot = state.z_cmd_dot[leg] +
              std::clamp(v_goal - state.z_cmd_dot[leg], -dv, dv);
      z = state.z_cmd[leg] + z_dot * dt;
    }
    s.z_cmd[leg] = z;
    s.z_cmd_dot[leg] = z_dot;
    Vec3 target = level_to_b * Vec3(ref[leg].position.x(),
                                    ref[leg].position.y(), z);
    if (!model.gait_enabled) target = state.foot_b[leg];
    const Vec3 next_b = target + (state.foot_b[leg] - target) * decay;
    const Vec3 foot_b_dot = (next_b - state.foot_b[leg]) / dt;

    const Vec3 foot_n = state.x + state.r * state.foot_b[leg];
    const Vec3 vel_n =
        state.v + state.r * (omega.cross(state.foot_b[leg]) + foot_b_dot);
    const Vec3 f = contact_force(foot_n, vel_n, model.terrain);
    const TerrainRegion& region = model.terrain.RegionAt(foot_n.x(), foot_n.y());

    LegState& ls = s.legs[leg];
    ls.q = leg_inverse_kinematics(model.robot, leg, state.foot_b[leg]);
    const Mat3 j = foot_jacobian(model.robot, leg, ls.q);
    ls.q_dot = guarded_inverse(j) * foot_b_dot;
    ls.tau = torques_for_foot_force(model.robot, leg, ls,
                                    state.r.transpose() * f);

    s.foot_n[leg] = foot_n;
    s.force_n[leg] = f;
    s.penetration[leg] = std::max(0.0, region.surface_height - foot_n.z());
    s.stance_ref[leg] = ref[leg].stance;
    s.foot_b_dot[leg] = foot_b_dot;
    s.foot_b[leg] = next_b;
    total_force += f;
  }

  const double m = model.robot.trunk_mass;
  s.accel_n = total_force / m + model.gravity_n;
  s.omega = omega;
  s.r_step = state.r;
  s.v = state.v + s.accel_n * dt;
  s.x = state.x + s.v * dt;
  s.r = integrate_rotation(state.r, omega, dt);
  s.t = t + dt;

  if (!s.x.allFinite() || !s.v.allFinite() || s.x.cwiseAbs().maxCoeff() > 1e3 ||
      s.v.norm() > 1e2) {
    throw Error(ErrorCode::kNumericalInstability, "simulation state diverged");
  }
  return s;
}

SensorNoiseParams SensorNoiseParams::Zero() {
  SensorNoiseParams n;
  n.accel_noise_density = 0.0;
  n.gyro_noise_density = 0.0;
  n.gyro_bias.setZero();
  n.encoder_resolution = 0.0;
  n.torque_noise = 0.0;
  return n;
}

void SensorNoiseParams::Validate() const {
  if (!(accel_noise_density >= 0.0) || !(gyro_noise_density >= 0.0) ||
      !(encoder_resolution >= 0.0) || !(torque_noise >= 0.0) ||
      !(sample_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid SensorNoiseParams");
  }
}

SensorSample sample_sensors(const SimState& state, const SimModel& model,
                            const SensorNoiseParams& noise,
                            std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sq = std::sqrt(noise.sample_rate);
  SensorSample out;
  const Vec3 f = state.r_step.transpose() * (state.accel_n - model.gravity_n);
  for (int i = 0; i < 3; ++i) {
    out.imu.accel[i] =
        f[i] + noise.accel_bias[i] + noise.accel_noise_density * sq * normal(rng);
  }
  for (int i = 0; i < 3; ++i) {
    out.imu.gyro[i] = state.omega[i] + noise.gyro_bias[i] +
                      noise.gyro_noise_density * sq * normal(rng);
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    LegState ls = state.legs[leg];
    if (noise.encoder_resolution > 0.0) {
      for (int i = 0; i < 3; ++i) {
        ls.q[i] = std::round(ls.q[i] / noise.encoder_resolution) *
                  noise.encoder_resolution;
      }
    }
    for (int i = 0; i < 3; ++i) ls.tau[i] += noise.torque_noise * normal(rng);
    out.legs[leg] = ls;
  }
  return out;
}

SimulationLog run_scenario(const ScenarioConfig& config) {
  config.model.robot.Validate();
  config.model.terrain.Validate();
  config.model.gait.Validate();
  config.noise.Validate();
  if (std::abs(config.noise.sample_rate * config.dt - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensor rate must equal the simulation rate");
  }
  const long n = std::lround(config.duration / config.dt);
  const long mcs_every =
      std::max(1L, std::lround(1.0 / (config.mcs_rate * config.dt)));

  std::mt19937_64 sensor_rng(config.seed);
  std::mt19937_64 mcs_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  SimulationLog log;
  log.dt = config.dt;
  log.t.reserve(n);
  log.sensors.reserve(n);
  log.truth.reserve(n);
  log.mcs.reserve(n / mcs_every + 1);

  SimState s = InitialSimState(config.model);
  auto push_mcs = [&](const SimState& st) {
    McsSample m;
    m.t = st.t;
    m.x = st.x;
    for (int i = 0; i < 3; ++i) m.x[i] += config.mcs_noise * normal(mcs_rng);
    m.r = st.r;
    m.v = st.v;
    log.mcs.push_back(m);
  };
  for (long k = 0; k < n; ++k) {
    s = step_dynamics(s, config.model, config.dt);
    s.t = (k + 1) * config.dt;
    log.t.push_back(s.t);
    log.sensors.push_back(sample_sensors(s, config.model, config.noise,
                                         sensor_rng));
    TruthSample tr;
    tr.x = s.x;
    tr.v = s.v;
    tr.r = s.r;
    tr.omega = s.omega;
    tr.force_n = s.force_n;
    tr.penetration = s.penetration;
    log.truth.push_back(tr);
    if ((k + 1) % mcs_every == 0) push_mcs(s);
  }
  return log;
}

}  // namespace softstride
