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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "softstride/error.h"
#include "softstride/estimator.h"
#include "softstride/odometry_fusion.h"

namespace softstride {
namespace {

std::array<Vec3, kNumLegs> StandingFeet(const RobotParams& p) {
  std::array<Vec3, kNumLegs> feet;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    feet[leg] = hfe_position(p, leg) + Vec3(0.0, 0.0, -0.5);
  }
  return feet;
}

std::array<ContactEstimate, kNumLegs> AllInContact() {
  std::array<ContactEstimate, kNumLegs> c;
  for (auto& e : c) e.alpha = true;
  return c;
}

// joint states for feet pinned in N while the trunk moves along (x(t), R(t))
std::array<LegState, kNumLegs> PinnedLegs(const RobotParams& p,
                                          const std::array<Vec3, kNumLegs>& feet_n,
                                          const Vec3& x, const Mat3& r,
                                          const Vec3& v_n, const Vec3& omega_b) {
  const double h = 1e-6;
  std::array<LegState, kNumLegs> legs;
  auto joints = [&](int leg, double t) {
    const Vec3 xt = x + v_n * t;
    const Mat3 rt = r * exp_so3(omega_b * t);
    return leg_inverse_kinematics(p, leg, rt.transpose() * (feet_n[leg] - xt));
  };
  for (int leg = 0; leg < kNumLegs; ++leg) {
    legs[leg].q = joints(leg, 0.0);
    legs[leg].q_dot = (joints(leg, h) - joints(leg, -h)) / (2.0 * h);
  }
  return legs;
}

TEST(LegOdometry, TranslatingTrunkOverPinnedFeet) {
  const RobotParams p;
  const Vec3 v_b(0.3, -0.1, 0.05);
  std::array<LegState, kNumLegs> legs;
  const auto feet = StandingFeet(p);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    legs[leg].q = leg_inverse_kinematics(p, leg, feet[leg]);
    // feet move at -v_b in B
    legs[leg].q_dot = foot_jacobian(p, leg, legs[leg].q).inverse() * (-v_b);
  }
  const OdometryResult r = leg_odometry(legs, AllInContact(), Vec3::Zero(), p);
  ASSERT_TRUE(r.valid);
  EXPECT_EQ(r.n_stance, 4);
  EXPECT_LT((r.v_b - v_b).norm(), 1e-9);
  for (const Vec3& v : r.per_leg) EXPECT_LT((v - v_b).norm(), 1e-9);
}

TEST(LegOdometry, NoStanceLegsIsInvalid) {
  const RobotParams p;
  std::array<LegState, kNumLegs> legs;
  for (auto& l : legs) l.q = Vec3(0.0, 0.5, -1.0);
  const OdometryResult r =
      leg_odometry(legs, std::array<ContactEstimate, kNumLegs>{}, Vec3(1, 2, 3), p);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.n_stance, 0);
  for (const Vec3& v : r.per_leg) EXPECT_EQ(v, Vec3::Zero());
}

TEST(LegOdometry, RotatingTrunkMatchesKinematicOracle) {
  const RobotParams p;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int i = 0; i < 20; ++i) {
    const Mat3 r = exp_so3(Vec3(0.1 * n(rng), 0.1 * n(rng), n(rng)));
    const Vec3 x(n(rng), n(rng), 0.5);
    std::array<Vec3, kNumLegs> feet_n;
    const auto feet_b = StandingFeet(p);
    for (int leg = 0; leg < kNumLegs; ++leg) feet_n[leg] = x + r * feet_b[leg];
    const Vec3 omega_b(0.2 * n(rng), 0.2 * n(rng), 1.0);
    const Vec3 v_n(0.2 * n(rng), 0.2 * n(rng), 0.1 * n(rng));
    const auto legs = PinnedLegs(p, feet_n, x, r, v_n, omega_b);
    const OdometryResult out = leg_odometry(legs, AllInContact(), omega_b, p);
    EXPECT_LT((out.v_b - r.transpose() * v_n).norm(), 1e-6);
  }
}

TEST(LegOdometry, PureRotationAboutBase) {
  const RobotParams p;
  const Vec3 omega_b(0.0, 0.0, 1.0);
  std::array<Vec3, kNumLegs> feet_n = StandingFeet(p);
  const auto legs =
      PinnedLegs(p, feet_n, Vec3::Zero(), Mat3::Identity(), Vec3::Zero(), omega_b);
  const OdometryResult out = leg_odometry(legs, AllInContact(), omega_b, p);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 x = leg_forward_kinematics(p, leg, legs[leg].q);
    const Vec3 jqd = foot_jacobian(p, leg, legs[leg].q) * legs[leg].q_dot;
    EXPECT_LT((jqd + omega_b.cross(x)).norm(), 1e-6);
  }
  EXPECT_LT(out.v_b.norm(), 1e-6);
}

TEST(KfPredict, ConstantVelocityDrift) {
  FusionState s;
  s.v_n = Vec3(1, 0, 0);
  const FusionConfig c;
  const Vec3 f_b = -c.g_n;
  const FusionState out = kf_predict(s, Mat3::Identity(), f_b, c, 0.001);
  EXPECT_LT((out.x_n - Vec3(0.001, 0, 0)).norm(), 1e-15);
  EXPECT_LT((out.v_n - s.v_n).norm(), 1e-15);
}

TEST(KfPredict, StationaryRobotStaysPut) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  const Mat3 r = exp_so3(Vec3(n(rng), n(rng), n(rng)));
  const FusionConfig c;
  // specific force of a body at rest: -g expressed in B
  const Vec3 f_b = r.transpose() * (-c.g_n);
  FusionState s;
  s.x_n = Vec3(1, 2, 3);
  for (int i = 0; i < 1000; ++i) s = kf_predict(s, r, f_b, c, 1e-3);
  EXPECT_LT((s.x_n - Vec3(1, 2, 3)).norm(), 1e-12);
  EXPECT_LT(s.v_n.norm(), 1e-12);
}

TEST(KfPredict, TraceGrowsWithProcessNoise) {
  FusionState s;
  const FusionConfig c;
  double trace = s.p.trace();
  for (int i = 0; i < 100; ++i) {
    s = kf_predict(s, Mat3::Identity(), -c.g_n, c, 1e-3);
    EXPECT_GT(s.p.trace(), trace);
    trace = s.p.trace();
  }
}

TEST(KfUpdate, ZeroInnovationShrinksVelocityBlock) {
  FusionState s;
  s.v_n = Vec3(0.2, -0.1, 0.0);
  s.x_n = Vec3(1, 1, 1);
  OdometryResult odo;
  odo.valid = true;
  odo.n_stance = 2;
  odo.v_b = s.v_n;
  const FusionState out = kf_update(s, odo, Mat3::Identity(), FusionConfig{});
  EXPECT_LT((out.v_n - s.v_n).norm(), 1e-15);
  EXPECT_LT((out.x_n - s.x_n).norm(), 1e-15);
  const double tr_before = s.p.block<3, 3>(3, 3).trace();
  const double tr_after = out.p.block<3, 3>(3, 3).trace();
  EXPECT_LT(tr_after, tr_before);
  EXPECT_TRUE(is_symmetric_pd(out.p));
}

TEST(KfUpdate, HugeMeasurementNoiseIsNoOp) {
  FusionState s;
  s.p = Mat6::Identity() * 0.1;
  OdometryResult odo;
  odo.valid = true;
  odo.v_b = Vec3(5, 5, 5);
  FusionConfig c;
  c.r_meas *= 1e12;
  const FusionState out = kf_update(s, odo, Mat3::Identity(), c);
  EXPECT_LT((out.v_n - s.v_n).norm(), 1e-9);
  EXPECT_LT((out.x_n - s.x_n).norm(), 1e-9);
  EXPECT_LT((out.p - s.p).norm(), 1e-9);
}

TEST(KfUpdate, MeasurementRotatedIntoNavFrame) {
  FusionState s;
  s.p = Mat6::Identity();
  OdometryResult odo;
  odo.valid = true;
  odo.v_b = Vec3(1, 0, 0);
  FusionConfig c;
  c.r_meas = Mat3::Identity() * 1e-12;
  const Mat3 r = exp_so3(Vec3(0, 0, M_PI / 2));
  const FusionState out = kf_update(s, odo, r, c);
  EXPECT_LT((out.v_n - Vec3(0, 1, 0)).norm(), 1e-9);
}

TEST(KfUpdate, InvalidOdometrySkipsUpdate) {
  FusionState s;
  s.v_n = Vec3(1, 2, 3);
  const FusionState out = kf_update(s, OdometryResult{}, Mat3::Identity(), FusionConfig{});
  EXPECT_EQ(out.v_n, s.v_n);
  EXPECT_EQ(out.p, s.p);
}

TEST(IsSymmetricPd, Cases) {
  EXPECT_TRUE(is_symmetric_pd(Mat6::Identity()));
  Mat6 m = Mat6::Identity();
  m(0, 1) = 1e-6;
  EXPECT_FALSE(is_symmetric_pd(m));
  m = Mat6::Identity();
  m(3, 3) = -1.0;
  EXPECT_FALSE(is_symmetric_pd(m));
}

// standing robot with legs carrying the trunk weight
struct Standing {
  EstimatorConfig config;
  std::array<LegState, kNumLegs> legs;
  ImuSample imu;
};

Standing MakeStanding() {
  Standing s;
  const RobotParams& p = s.config.robot;
  const auto feet = StandingFeet(p);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    s.legs[leg].q = leg_inverse_kinematics(p, leg, feet[leg]);
    s.legs[leg].tau = torques_for_foot_force(
        p, leg, s.legs[leg], Vec3(0, 0, p.trunk_mass * p.gravity_magnitude / 4));
  }
  s.imu.accel = Vec3(0, 0, p.gravity_magnitude);
  return s;
}

TEST(Estimator, ZeroMotionStaysConstant) {
  Standing st = MakeStanding();
  EstimatorState s = InitialEstimatorState(Vec3(0, 0, 0.5), Mat3::Identity());
  for (int i = 0; i < 2000; ++i) {
    const StepResult r = estimator_pipeline_step(st.config, s, st.imu, st.legs, 1e-3);
    ASSERT_FALSE(r.diagnostics.error.has_value());
    s = r.state;
  }
  EXPECT_LT((s.fusion.x_n - Vec3(0, 0, 0.5)).norm(), 1e-9);
  EXPECT_LT(s.fusion.v_n.norm(), 1e-9);
  EXPECT_LT(rotation_angle_between(s.attitude.r_hat, Mat3::Identity()), 1e-9);
  for (bool a : s.alpha) EXPECT_TRUE(a);
}

TEST(Estimator, MissingLegIsExcluded) {
  Standing st = MakeStanding();
  st.legs[kRH].q_dot[1] = std::numeric_limits<double>::quiet_NaN();
  const EstimatorState s = InitialEstimatorState(Vec3::Zero(), Mat3::Identity());
  const StepResult r = estimator_pipeline_step(st.config, s, st.imu, st.legs, 1e-3);
  EXPECT_FALSE(r.diagnostics.error.has_value());
  EXPECT_TRUE(r.diagnostics.leg_excluded[kRH]);
  EXPECT_FALSE(r.diagnostics.alpha[kRH]);
  EXPECT_EQ(r.diagnostics.odometry.n_stance, 3);
  EXPECT_TRUE(r.state.fusion.x_n.allFinite());
}

TEST(Estimator, SingularLegIsExcluded) {
  Standing st = MakeStanding();
  st.legs[kLF].q = Vec3(0.0, 0.2, 0.0);
  const EstimatorState s = InitialEstimatorState(Vec3::Zero(), Mat3::Identity());
  const StepResult r = estimator_pipeline_step(st.config, s, st.imu, st.legs, 1e-3);
  EXPECT_FALSE(r.diagnostics.error.has_value());
  EXPECT_TRUE(r.diagnostics.leg_excluded[kLF]);
  EXPECT_EQ(r.diagnostics.odometry.n_stance, 3);
}

TEST(Estimator, FailureReturnsPriorState) {
  Standing st = MakeStanding();
  const EstimatorState s = InitialEstimatorState(Vec3(1, 2, 3), Mat3::Identity());
  const StepResult r = estimator_pipeline_step(st.config, s, st.imu, st.legs, -1.0);
  ASSERT_TRUE(r.diagnostics.error.has_value());
  EXPECT_EQ(r.state.fusion.x_n, s.fusion.x_n);
  EXPECT_EQ(r.state.fusion.p, s.fusion.p);
}

TEST(Estimator, TracksConstantVelocityOverPinnedFeet) {
  Standing st = MakeStanding();
  const RobotParams& p = st.config.robot;
  const Vec3 v_n(0.2, -0.1, 0.0);
  std::array<Vec3, kNumLegs> feet_n = StandingFeet(p);
  for (auto& f : feet_n) f += Vec3(0, 0, 0.5);
  EstimatorState s = InitialEstimatorState(Vec3(0, 0, 0.5), Mat3::Identity());
  s.fusion.v_n = v_n;
  Vec3 x(0, 0, 0.5);
  const double dt = 1e-3;
  for (int i = 0; i < 100; ++i) {
    x += v_n * dt;
    auto legs = PinnedLegs(p, feet_n, x, Mat3::Identity(), v_n, Vec3::Zero());
    for (int leg = 0; leg < kNumLegs; ++leg) {
      legs[leg].tau = torques_for_foot_force(p, leg, legs[leg],
                                             Vec3(0, 0, p.trunk_mass * 9.81 / 4));
    }
    const StepResult r = estimator_pipeline_step(st.config, s, st.imu, legs, dt);
    ASSERT_FALSE(r.diagnostics.error.has_value());
    s = r.state;
  }
  EXPECT_LT((s.fusion.v_n - v_n).norm(), 1e-6);
  EXPECT_LT((s.fusion.x_n - x).norm(), 1e-6);
}

}  // namespace
}  // namespace softstride
