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

#ifndef SOFTSTRIDE_TERRAIN_SIM_H_
#define SOFTSTRIDE_TERRAIN_SIM_H_

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "softstride/estimator.h"
#include "softstride/robot_model.h"
#include "softstride/so3.h"

namespace softstride {

inline constexpr double kRigidStiffness = 1e6;
inline constexpr double kRigidDamping = 1e4;

struct TerrainRegion {
  enum class Kind { kRigid, kSoft };
  Kind kind = Kind::kRigid;
  double k = kRigidStiffness;
  double d = kRigidDamping;
  double x_min = -50.0, x_max = 50.0;
  double y_min = -50.0, y_max = 50.0;
  double surface_height = 0.0;
  // soft layer depth; below it the foot meets a rigid base
  double thickness = 0.2;

  bool Contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct TerrainModel {
  std::vector<TerrainRegion> regions;
  double viscous_friction = 5e3;  // N s/m
  double friction_coefficient = 0.8;

  static TerrainModel Rigid();
  // foam block of the given size centred at the origin
  static TerrainModel Soft(double k = 2400.0, double d = 50.0,
                           double size_x = 1.6, double size_y = 1.2,
                           double thickness = 0.2);

  // throws kOutOfRegion
  const TerrainRegion& RegionAt(double x, double y) const;
  // throws kInvalidArgument on bad parameters or overlapping regions
  void Validate() const;
};

struct GaitParams {
  double period = 0.5;
  double duty_factor = 0.55;
  double step_height = 0.08;
  double step_length = 0.0;
  // phase offsets; diagonal pairs LF+RH and RF+LH
  std::array<double, kNumLegs> phase_offset = {0.0, 0.5, 0.5, 0.0};

  void Validate() const;
};

struct ControllerGains {
  double nominal_height = 0.45;
  double tracking_time_constant = 0.01;  // first-order leg tracking lag, s
  // liftoff: foot rises at F_z / unload_admittance for unload_time
  double unload_admittance = 2e4;  // N s/m
  double unload_time = 0.1;
  // stance: commanded foot height moves toward the extension at most this fast
  double push_speed = 1.0;  // m/s
  double push_accel = 5.0;  // m/s^2
  double touchdown_clearance = 0.001;  // swing ends this far above the surface
  double kp_height = 0.0;
  double ki_height = 2.0;
  double kd_height = 0.0;
  double min_extension = 0.3;
  double max_extension = 0.66;
};

// prescribed body rate w_i(t) = a_i sin(2 pi f_i t + phi_i)
struct AttitudeMotion {
  Vec3 amplitude = Vec3(0.04, 0.04, 0.02);
  Vec3 frequency = Vec3(0.37, 0.23, 0.11);
  Vec3 phase = Vec3(0.0, 1.0, 2.0);

  Vec3 Rate(double t) const;
};

// Swing heights in the level frame (m, relative to the hips). The foot holds
// liftoff_z for unload_time, then follows a C1 arc through apex_z at the
// middle of the remaining swing and lands at touchdown_z.
struct SwingProfile {
  double liftoff_z = 0.0;
  double touchdown_z = 0.0;
  double apex_z = 0.0;
  double unload_time = 0.0;
};

struct FootTarget {
  Vec3 position = Vec3::Zero();  // in B
  Vec3 velocity = Vec3::Zero();
  bool stance = true;
};

// stance_extension: current stance leg length below the hips
std::array<FootTarget, kNumLegs> trot_reference(double t,
                                                const GaitParams& gait,
                                                const RobotParams& params,
                                                double nominal_height,
                                                double stance_extension);
// per-leg swing profiles override the level-ground default
std::array<FootTarget, kNumLegs> trot_reference(
    double t, const GaitParams& gait, const RobotParams& params,
    double stance_extension, const std::array<SwingProfile, kNumLegs>& swing);
// phase in [0, 1) of a leg; stance while phase < duty_factor
double gait_phase(double t, const GaitParams& gait, int leg);
std::array<FootTarget, kNumLegs> trot_reference(double t,
                                                const GaitParams& gait,
                                                const RobotParams& params,
                                                double nominal_height);

// force on the foot, in N; throws kOutOfRegion
Vec3 contact_force(const Vec3& foot_pos_n, const Vec3& foot_vel_n,
                   const TerrainModel& terrain);

struct SimState {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  RotationMatrix r = RotationMatrix::Identity();
  RotationMatrix r_step = RotationMatrix::Identity();  // attitude at the start of the last step
  Vec3 omega = Vec3::Zero();  // body rate used over the last step
  Vec3 accel_n = Vec3::Zero();  // trunk acceleration over the last step
  std::array<Vec3, kNumLegs> foot_b;
  std::array<Vec3, kNumLegs> foot_b_dot;
  std::array<LegState, kNumLegs> legs;
  std::array<Vec3, kNumLegs> foot_n;
  std::array<Vec3, kNumLegs> force_n;
  std::array<double, kNumLegs> penetration = {0.0, 0.0, 0.0, 0.0};
  std::array<bool, kNumLegs> stance_ref = {true, true, true, true};
  double height_integral = 0.0;
  double stance_extension = 0.45;
  // controller memory per leg, level frame
  std::array<double, kNumLegs> z_cmd = {0.0, 0.0, 0.0, 0.0};
  std::array<double, kNumLegs> z_cmd_dot = {0.0, 0.0, 0.0, 0.0};
  std::array<double, kNumLegs> liftoff_z = {0.0, 0.0, 0.0, 0.0};
};

struct SimModel {
  RobotParams robot;
  TerrainModel terrain = TerrainModel::Rigid();
  GaitParams gait;
  ControllerGains controller;
  AttitudeMotion attitude;
  // gravity in N; set to zero for ballistic tests
  Vec3 gravity_n = Vec3(0.0, 0.0, -9.81);
  // false holds every foot at its stance target (no gait)
  bool gait_enabled = true;
};

// standing state at the nominal height with feet at the static sink depth
SimState InitialSimState(const SimModel& model);

// Semi-implicit Euler step. throws kNumericalInstability, kOutOfRegion
SimState step_dynamics(const SimState& state, const SimModel& model,
                       double dt);

struct SensorNoiseParams {
  Vec3 accel_bias = Vec3::Zero();
  double accel_noise_density = 0.02;  // m/s^2/sqrt(Hz)
  Vec3 gyro_bias = Vec3(0.002, -0.001, 0.0015);
  double gyro_noise_density = 2e-4;   // rad/s/sqrt(Hz)
  double encoder_resolution = 2.0 * 3.14159265358979323846 / 262144.0;
  double torque_noise = 0.05;         // N m
  double sample_rate = 1000.0;

  static SensorNoiseParams Zero();
  void Validate() const;
};

struct SensorSample {
  ImuSample imu;
  std::array<LegState, kNumLegs> legs;
};

SensorSample sample_sensors(const SimState& state, const SimModel& model,
                            const SensorNoiseParams& noise, std::mt19937_64& rng);

struct ScenarioConfig {
  SimModel model;
  SensorNoiseParams noise;
  double duration = 300.0;
  double dt = 1e-3;
  uint64_t seed = 1;
  double mcs_rate = 250.0;
  double mcs_noise = 1e-3;
};

struct TruthSample {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  RotationMatrix r = RotationMatrix::Identity();
  Vec3 omega = Vec3::Zero();
  std::array<Vec3, kNumLegs> force_n;
  std::array<double, kNumLegs> penetration = {0.0, 0.0, 0.0, 0.0};
};

struct McsSample {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  RotationMatrix r = RotationMatrix::Identity();
  Vec3 v = Vec3::Zero();  // true velocity, for velocity metrics
};

struct SimulationLog {
  double dt = 1e-3;
  std::vector<double> t;
  std::vector<SensorSample> sensors;
  std::vector<TruthSample> truth;  // empty for external logs
  std::vector<McsSample> mcs;      // 250 Hz channel, times match rows
};

SimulationLog run_scenario(const ScenarioConfig& config);

}  // namespace softstride

#endif  // SOFTSTRIDE_TERRAIN_SIM_H_
