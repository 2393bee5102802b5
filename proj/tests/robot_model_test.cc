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
#include <random>

#include "softstride/error.h"
#include "softstride/robot_model.h"

namespace softstride {
namespace {

Vec3 RandomJoints(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> q0(-0.6, 0.3), q1(-1.0, 1.0),
      q2(-2.4, -0.3);
  return Vec3(q0(rng), q1(rng), q2(rng));
}

TEST(ForwardKinematics, StraightLegHangsBelowHfe) {
  const RobotParams p;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 foot = leg_forward_kinematics(p, leg, Vec3::Zero());
    const Vec3 hfe = hfe_position(p, leg);
    EXPECT_LT((foot - (hfe - Vec3(0, 0, 0.70))).norm(), 1e-15) << LegName(leg);
  }
}

TEST(ForwardKinematics, KneeBentNinetyDegrees) {
  const RobotParams p;
  const double l1 = 0.35, l2 = 0.35;
  const double q1 = 0.3, q2 = -M_PI / 2;
  // planar oracle: thigh hangs at q1 from vertical, shank turns a further q2
  const double thigh_x = -l1 * std::sin(q1), thigh_z = -l1 * std::cos(q1);
  const double shank_x = -l2 * std::sin(q1 + q2),
               shank_z = -l2 * std::cos(q1 + q2);
  const Vec3 expected = hfe_position(p, kLF) +
                        Vec3(thigh_x + shank_x, 0.0, thigh_z + shank_z);
  EXPECT_LT((leg_forward_kinematics(p, kLF, Vec3(0, q1, q2)) - expected).norm(),
            1e-12);
}

TEST(ForwardKinematics, AbductionSwingsFootOutward) {
  const RobotParams p;
  const Vec3 q(0.2, 0.0, 0.0);
  const Vec3 left = leg_forward_kinematics(p, kLF, q) - hfe_position(p, kLF);
  const Vec3 right = leg_forward_kinematics(p, kRF, q) - hfe_position(p, kRF);
  EXPECT_NEAR(left.y(), 0.70 * std::sin(0.2), 1e-12);
  EXPECT_NEAR(right.y(), -0.70 * std::sin(0.2), 1e-12);
}

TEST(ForwardKinematics, LeftRightMirror) {
  const RobotParams p;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Vec3 q = RandomJoints(rng);
    const Vec3 lf = leg_forward_kinematics(p, kLF, q);
    const Vec3 rf = leg_forward_kinematics(p, kRF, q);
    EXPECT_NEAR(lf.x(), rf.x(), 1e-15);
    EXPECT_NEAR(lf.y(), -rf.y(), 1e-15);
    EXPECT_NEAR(lf.z(), rf.z(), 1e-15);
  }
}

TEST(InverseKinematics, RoundTrip) {
  const RobotParams p;
  std::mt19937_64 rng(2);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 q = RandomJoints(rng);
      const Vec3 foot = leg_forward_kinematics(p, leg, q);
      // solver branch covers feet below the hip flexion axis
      if (foot.z() >= hfe_position(p, leg).z()) continue;
      const Vec3 back = leg_inverse_kinematics(p, leg, foot);
      EXPECT_LT((back - q).norm(), 1e-9) << LegName(leg);
    }
  }
}

TEST(FootJacobian, MatchesCentralDifferences) {
  const RobotParams p;
  std::mt19937_64 rng(3);
  const double delta = 1e-6;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 q = RandomJoints(rng);
      Mat3 fd;
      for (int k = 0; k < 3; ++k) {
        Vec3 dq = Vec3::Zero();
        dq[k] = delta;
        fd.col(k) = (leg_forward_kinematics(p, leg, q + dq) -
                     leg_forward_kinematics(p, leg, q - dq)) /
                    (2.0 * delta);
      }
      EXPECT_LT((foot_jacobian(p, leg, q) - fd).norm(), 1e-6);
    }
  }
}

TEST(FootJacobian, LinkComJacobianMatchesCentralDifferences) {
  const RobotParams p;
  std::mt19937_64 rng(4);
  const double delta = 1e-6;
  for (int link = 0; link < 3; ++link) {
    const Vec3 q = RandomJoints(rng);
    Mat3 fd;
    for (int k = 0; k < 3; ++k) {
      Vec3 dq = Vec3::Zero();
      dq[k] = delta;
      fd.col(k) = (link_com_position(p, kRH, link, q + dq) -
                   link_com_position(p, kRH, link, q - dq)) /
                  (2.0 * delta);
    }
    EXPECT_LT((link_com_jacobian(p, kRH, link, q) - fd).norm(), 1e-6);
  }
}

TEST(FootJacobian, StraightLegLosesRank) {
  const RobotParams p;
  const Mat3 j = foot_jacobian(p, kLF, Vec3(0.1, 0.2, 0.0));
  Eigen::JacobiSVD<Mat3> svd(j);
  EXPECT_LT(svd.singularValues()[2], 1e-12);
}

TEST(FootJacobian, ZeroRateZeroVelocity) {
  const RobotParams p;
  EXPECT_EQ(foot_jacobian(p, kLH, Vec3(0.1, 0.4, -1.0)) * Vec3::Zero(),
            Vec3::Zero());
}

TEST(BiasTerm, MasslessLinksGiveZero) {
  RobotParams p;
  p.link_masses = {0.0, 0.0, 0.0};
  EXPECT_EQ(leg_bias_term(p, kLF, Vec3(0.1, 0.5, -1.1), Vec3::Zero()),
            Vec3::Zero());
}

TEST(BiasTerm, EqualsPerLinkGravityTorque) {
  const RobotParams p;
  std::mt19937_64 rng(5);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 q = RandomJoints(rng);
    const Vec3 g_b(0.0, 0.0, p.gravity_magnitude);
    // virtual work on each link centre: tau = d/dq (m g . c(q))
    Vec3 oracle = Vec3::Zero();
    const double delta = 1e-6;
    for (int link = 0; link < 3; ++link) {
      for (int k = 0; k < 3; ++k) {
        Vec3 dq = Vec3::Zero();
        dq[k] = delta;
        const double up = g_b.dot(link_com_position(p, leg, link, q + dq));
        const double dn = g_b.dot(link_com_position(p, leg, link, q - dq));
        oracle[k] += p.link_masses[link] * (up - dn) / (2.0 * delta);
      }
    }
    EXPECT_LT((leg_bias_term(p, leg, q, Vec3::Zero()) - oracle).norm(), 1e-6);
  }
}

TEST(BiasTerm, LinearInMass) {
  RobotParams p;
  const Vec3 q(0.05, 0.6, -1.2);
  const Vec3 h1 = leg_bias_term(p, kRF, q, Vec3::Zero());
  for (double& m : p.link_masses) m *= 2.0;
  const Vec3 h2 = leg_bias_term(p, kRF, q, Vec3::Zero());
  EXPECT_LT((h2 - 2.0 * h1).norm(), 1e-12);
}

TEST(BiasTerm, CoriolisFlagOnlyActsWithMotion) {
  RobotParams p;
  const Vec3 q(0.05, 0.6, -1.2), q_dot(0.5, -2.0, 3.0);
  const Vec3 h0 = leg_bias_term(p, kLF, q, q_dot);
  p.coriolis_terms = true;
  EXPECT_LT((leg_bias_term(p, kLF, q, Vec3::Zero()) - h0).norm(), 1e-12);
  EXPECT_GT((leg_bias_term(p, kLF, q, q_dot) - h0).norm(), 1e-3);
}

TEST(GuardedInverse, InvertsWellConditioned) {
  Mat3 m;
  m << 2, 1, 0, 0, 3, 1, 1, 0, 4;
  EXPECT_LT((guarded_inverse(m) * m - Mat3::Identity()).norm(), 1e-14);
}

TEST(GuardedInverse, RejectsSingular) {
  Mat3 m = Mat3::Identity();
  m(1, 1) = 1e-12;
  try {
    guarded_inverse(m);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularJacobian);
  }
}

TEST(EstimateGrf, BiasOnlyTorquesGiveNoContact) {
  const RobotParams p;
  LegState s;
  s.q = Vec3(0.0, 0.5, -1.0);
  s.tau = leg_bias_term(p, kLF, s.q, s.q_dot);
  const ContactEstimate c = estimate_grf(p, kLF, s, ContactDetectorConfig{}, false);
  EXPECT_NEAR(c.force_norm, 0.0, 1e-12);
  EXPECT_FALSE(c.alpha);
  EXPECT_EQ(c.grf, Vec3::Zero());
}

TEST(EstimateGrf, RoundTripThroughTorques) {
  const RobotParams p;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> f(-200.0, 200.0), fz(50.0, 600.0);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int i = 0; i < 50; ++i) {
      LegState s;
      s.q = RandomJoints(rng);
      s.q_dot = Vec3(f(rng), f(rng), f(rng)) / 100.0;
      const Vec3 force(f(rng), f(rng), fz(rng));
      s.tau = torques_for_foot_force(p, leg, s, force);
      const ContactEstimate c = estimate_grf(p, leg, s, ContactDetectorConfig{}, false);
      EXPECT_TRUE(c.alpha);
      EXPECT_LT((c.grf - force).norm() / force.norm(), 1e-9);
    }
  }
}

TEST(EstimateGrf, SingularLegThrows) {
  const RobotParams p;
  LegState s;
  s.q = Vec3(0.0, 0.3, 0.0);
  try {
    estimate_grf(p, kLF, s, ContactDetectorConfig{}, false);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularJacobian);
  }
}

TEST(DetectContact, PlainThreshold) {
  ContactDetectorConfig c;
  EXPECT_TRUE(detect_contact(c.epsilon + 1.0, c, false));
  EXPECT_FALSE(detect_contact(c.epsilon - 1.0, c, true));
}

TEST(DetectContact, SchmittHoldsInsideBand) {
  ContactDetectorConfig c;
  c.mode = ContactDetectorConfig::Mode::kSchmitt;
  c.hysteresis_band = 10.0;
  EXPECT_TRUE(detect_contact(c.epsilon, c, true));
  EXPECT_FALSE(detect_contact(c.epsilon, c, false));
  EXPECT_TRUE(detect_contact(c.epsilon + 6.0, c, false));
  EXPECT_FALSE(detect_contact(c.epsilon - 6.0, c, true));
}

TEST(DetectContact, OscillationChattersOnlyInPlainMode) {
  ContactDetectorConfig plain;
  ContactDetectorConfig schmitt = plain;
  plain.hysteresis_band = schmitt.hysteresis_band = 10.0;
  schmitt.mode = ContactDetectorConfig::Mode::kSchmitt;
  bool a_plain = true, a_schmitt = true;
  int toggles_plain = 0, toggles_schmitt = 0;
  for (int i = 0; i < 100; ++i) {
    const double f = plain.epsilon + (i % 2 == 0 ? -1.0 : 1.0);
    const bool np = detect_contact(f, plain, a_plain);
    const bool ns = detect_contact(f, schmitt, a_schmitt);
    toggles_plain += np != a_plain;
    toggles_schmitt += ns != a_schmitt;
    a_plain = np;
    a_schmitt = ns;
  }
  EXPECT_EQ(toggles_plain, 100);
  EXPECT_EQ(toggles_schmitt, 0);
}

TEST(DetectorConfig, Validation) {
  ContactDetectorConfig c;
  c.epsilon = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c.epsilon = 10.0;
  c.hysteresis_band = -1.0;
  EXPECT_THROW(c.Validate(), Error);
}

}  // namespace
}  // namespace softstride
