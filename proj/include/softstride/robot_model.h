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

#ifndef SOFTSTRIDE_ROBOT_MODEL_H_
#define SOFTSTRIDE_ROBOT_MODEL_H_

#include <array>

#include "softstride/so3.h"

namespace softstride {

enum Leg : int { kLF = 0, kRF = 1, kLH = 2, kRH = 3 };
inline constexpr int kNumLegs = 4;

const char* LegName(int leg);

// Body frame: x forward, y left, z up. Joints per leg: HAA (about body x,
// mirrored on right legs), HFE and KFE (planar, q = 0 points the leg down).
struct RobotParams {
  double trunk_mass = 90.0;
  Vec3 trunk_com_offset = Vec3::Zero();
  std::array<Vec3, kNumLegs> hip_positions = {
      Vec3(0.3735, 0.207, 0.0), Vec3(0.3735, -0.207, 0.0),
      Vec3(-0.3735, 0.207, 0.0), Vec3(-0.3735, -0.207, 0.0)};
  std::array<double, 3> link_lengths = {0.08, 0.35, 0.35};
  std::array<double, 3> link_masses = {2.9, 2.6, 0.9};
  double gravity_magnitude = 9.81;
  // point-mass velocity-product terms in h
  bool coriolis_terms = false;
  Vec3 q_min = Vec3(-1.2, -2.0, -2.8);
  Vec3 q_max = Vec3(0.5, 2.0, 0.1);

  // throws kInvalidArgument on violated invariants
  void Validate() const;
};

struct LegState {
  Vec3 q = Vec3::Zero();
  Vec3 q_dot = Vec3::Zero();
  Vec3 tau = Vec3::Zero();

  bool AllFinite() const {
    return q.allFinite() && q_dot.allFinite() && tau.allFinite();
  }
};

struct ContactEstimate {
  bool alpha = false;
  Vec3 grf = Vec3::Zero();  // in B, force exerted by the ground on the foot
  double force_norm = 0.0;  // ungated
};

struct ContactDetectorConfig {
  enum class Mode { kPlain, kSchmitt };
  double epsilon = 30.0;
  double hysteresis_band = 0.0;
  Mode mode = Mode::kPlain;

  void Validate() const;
};

// +1 for left legs, -1 for right
double LegSide(int leg);
// +1 for front legs, -1 for hind
double LegFore(int leg);

Vec3 leg_forward_kinematics(const RobotParams& params, int leg, const Vec3& q);

// foot velocity in B with the trunk fixed: J * q_dot
Mat3 foot_jacobian(const RobotParams& params, int leg, const Vec3& q);

// joint angles reaching foot position p (in B); knee bent backwards (q2 < 0).
// Targets out of reach are clamped to the workspace boundary.
Vec3 leg_inverse_kinematics(const RobotParams& params, int leg, const Vec3& p);

// position of the HFE joint in B
Vec3 hfe_position(const RobotParams& params, int leg);

// link centres of mass in B and their Jacobians, for links 0..2
Vec3 link_com_position(const RobotParams& params, int leg, int link,
                       const Vec3& q);
Mat3 link_com_jacobian(const RobotParams& params, int leg, int link,
                       const Vec3& q);

// h = sum_i J_i^T m_i g_b (+ velocity terms if enabled). g_b is the
// upward gravity reaction in B, level trunk by default.
Vec3 leg_bias_term(const RobotParams& params, int leg, const Vec3& q,
                   const Vec3& q_dot);
Vec3 leg_bias_term(const RobotParams& params, int leg, const Vec3& q,
                   const Vec3& q_dot, const Vec3& g_b);

// adjugate inverse with Frobenius condition guard
// throws kSingularJacobian if cond_F(m) > max_cond
Mat3 guarded_inverse(const Mat3& m, double max_cond = 1e8);

bool detect_contact(double force_norm, const ContactDetectorConfig& config,
                    bool prev_alpha);

// F = -alpha (J^T)^-1 (tau - h); throws kSingularJacobian
ContactEstimate estimate_grf(const RobotParams& params, int leg,
                             const LegState& state,
                             const ContactDetectorConfig& detector,
                             bool prev_alpha);

// joint torques producing foot force f_b in static balance: tau = h - J^T f
Vec3 torques_for_foot_force(const RobotParams& params, int leg,
                            const LegState& state, const Vec3& f_b);

}  // namespace softstride

#endif  // SOFTSTRIDE_ROBOT_MODEL_H_
