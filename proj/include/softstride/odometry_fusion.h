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

#ifndef SOFTSTRIDE_ODOMETRY_FUSION_H_
#define SOFTSTRIDE_ODOMETRY_FUSION_H_

#include <array>

#include "softstride/robot_model.h"
#include "softstride/so3.h"

namespace softstride {

struct FusionState {
  Vec3 x_n = Vec3::Zero();
  Vec3 v_n = Vec3::Zero();
  Mat6 p = Mat6::Identity() * 1e-4;
};

struct FusionConfig {
  Mat6 q = DefaultQ();  // per second
  Mat3 r_meas = Mat3::Identity() * 1e-2;
  Vec3 g_n = Vec3(0.0, 0.0, -9.81);

  static Mat6 DefaultQ();
  void Validate() const;
};

struct OdometryResult {
  Vec3 v_b = Vec3::Zero();
  int n_stance = 0;
  bool valid = false;
  std::array<Vec3, kNumLegs> per_leg = {Vec3::Zero(), Vec3::Zero(),
                                        Vec3::Zero(), Vec3::Zero()};
};

// v_l = -alpha_l (J q_dot + w x x_l), averaged over stance legs in leg order.
OdometryResult leg_odometry(const std::array<LegState, kNumLegs>& legs,
                            const std::array<ContactEstimate, kNumLegs>& contacts,
                            const Vec3& omega_b, const RobotParams& params);

// u = R_hat f_s + g_n; constant-acceleration step and Euler Riccati step
FusionState kf_predict(const FusionState& state, const RotationMatrix& r_hat,
                       const Vec3& f_s_b, const FusionConfig& config,
                       double dt);

// z = R_hat v_b, H = [0 I]; skipped for invalid odometry.
// throws kCovarianceNotPD
FusionState kf_update(const FusionState& state, const OdometryResult& odo,
                      const RotationMatrix& r_hat, const FusionConfig& config);

bool is_symmetric_pd(const Mat6& p, double sym_tol = 1e-12);

}  // namespace softstride

#endif  // SOFTSTRIDE_ODOMETRY_FUSION_H_
