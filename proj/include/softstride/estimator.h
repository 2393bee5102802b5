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

#ifndef SOFTSTRIDE_ESTIMATOR_H_
#define SOFTSTRIDE_ESTIMATOR_H_

#include <array>
#include <optional>

#include "softstride/attitude_observer.h"
#include "softstride/error.h"
#include "softstride/odometry_fusion.h"
#include "softstride/robot_model.h"

namespace softstride {

struct ImuSample {
  Vec3 gyro = Vec3::Zero();   // rad/s, B
  Vec3 accel = Vec3::Zero();  // specific force, m/s^2, B
};

struct EstimatorConfig {
  RobotParams robot;
  ContactDetectorConfig detector;
  // single gravity vector on a trotting trunk: low injection bandwidth
  NloGains nlo = TrottingNloGains();
  bool use_xkf = true;
  Mat6 xkf_q = DefaultXkfQ();
  Mat3 xkf_r = Mat3::Identity() * 1e-2;
  // accelerometer pairs with | |f| - g | > gate * g get variance x100
  double accel_gate = 0.2;
  double accel_downweight = 100.0;
  FusionConfig fusion;

  static Mat6 DefaultXkfQ();
  static NloGains TrottingNloGains();
};

struct AttitudeObserverState {
  NloState nlo;
  XkfState xkf;
  RotationMatrix r_hat = RotationMatrix::Identity();  // corrected
};

struct EstimatorState {
  AttitudeObserverState attitude;
  FusionState fusion;
  std::array<bool, kNumLegs> alpha = {false, false, false, false};
};

struct Diagnostics {
  std::array<bool, kNumLegs> alpha = {false, false, false, false};
  std::array<Vec3, kNumLegs> grf = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                    Vec3::Zero()};
  std::array<double, kNumLegs> force_norm = {0.0, 0.0, 0.0, 0.0};
  std::array<bool, kNumLegs> leg_excluded = {false, false, false, false};
  OdometryResult odometry;
  std::optional<ErrorCode> error;
};

struct StepResult {
  EstimatorState state;
  Diagnostics diagnostics;
};

EstimatorState InitialEstimatorState(const Vec3& x0, const RotationMatrix& r0);

// contact detection -> attitude observer -> leg odometry -> KF predict ->
// KF update. Transactional: on any component error the prior state is
// returned and diagnostics.error is set.
StepResult estimator_pipeline_step(const EstimatorConfig& config,
                                   const EstimatorState& prior,
                                   const ImuSample& imu,
                                   const std::array<LegState, kNumLegs>& legs,
                                   double dt);

}  // namespace softstride

#endif  // SOFTSTRIDE_ESTIMATOR_H_
