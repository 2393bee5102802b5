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

#include "softstride/robot_model.h"

#include <algorithm>
#include <cmath>

#include "softstride/error.h"

namespace softstride {
namespace {

// Point at distance a1 along the thigh and a2 along the shank, in the
// sagittal plane: returns (A, B) with A forward and B vertical.
struct Planar {
  double a, b;
  double da1, db1;  // d/dq1
  double da2, db2;  // d/dq2
};

Planar PlanarPoint(double q1, double q2, double a1, double a2) {
  const double s1 = std::sin(q1), c1 = std::cos(q1);
  const double s12 = std::sin(q1 + q2), c12 = std::cos(q1 + q2);
  Planar p;
  p.a = -a1 * s1 - a2 * s12;
  p.b = -a1 * c1 - a2 * c12;
  p.da1 = -a1 * c1 - a2 * c12;
  p.db1 = a1 * s1 + a2 * s12;
  p.da2 = -a2 * c12;
  p.db2 = a2 * s12;
  return p;
}

Vec3 PlaneToBody(const RobotParams& params, int leg, const Vec3& q,
                 const Planar& p) {
  const double side = LegSide(leg);
  return hfe_position(params, leg) +
         Vec3(p.a, -side * std::sin(q[0]) * p.b, std::cos(q[0]) * p.b);
}

Mat3 PlaneJacobian(int leg, const Vec3& q, const Planar& p) {
  const double side = LegSide(leg);
  const double s0 = std::sin(q[0]), c0 = std::cos(q[0]);
  Mat3 j;
  j.col(0) = Vec3(0.0, -side * c0 * p.b, -s0 * p.b);
  j.col(1) = Vec3(p.da1, -side * s0 * p.db1, c0 * p.db1);
  j.col(2) = Vec3(p.da2, -side * s0 * p.db2, c0 * p.db2);
  return j;
}

Planar LinkPlanar(const RobotParams& params, int link, const Vec3& q) {
  const double l1 = params.link_lengths[1], l2 = params.link_lengths[2];
  switch (link) {
    case 1: return PlanarPoint(q[1], q[2], 0.5 * l1, 0.0);
    case 2: return PlanarPoint(q[1], q[2], l1, 0.5 * l2);
    default: return PlanarPoint(q[1], q[2], l1, l2);
  }
}

}  // namespace

const char* LegName(int leg) {
  static const char* kNames[kNumLegs] = {"LF", "RF", "LH", "RH"};
  return kNames[leg];
}

double LegSide(int leg) { return (leg == kLF || leg == kLH) ? 1.0 : -1.0; }
double LegFore(int leg) { return (leg == kLF || leg == kRF) ? 1.0 : -1.0; }

void RobotParams::Validate() const {
  bool ok = trunk_mass > 0.0 && gravity_magnitude > 0.0 &&
            trunk_com_offset.allFinite();
  for (double l : link_lengths) ok = ok && l > 0.0;
  for (double m : link_masses) ok = ok && m >= 0.0;
  for (const Vec3& h : hip_positions) ok = ok && h.allFinite();
  ok = ok && (q_min.array() <= q_max.array()).all();
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "invalid RobotParams");
}

void ContactDetectorConfig::Validate() const {
  if (!(epsilon > 0.0) || !(hysteresis_band >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid ContactDetectorConfig");
  }
}

Vec3 hfe_position(const RobotParams& params, int leg) {
  return params.hip_positions[leg] +
         Vec3(LegFore(leg) * params.link_lengths[0], 0.0, 0.0);
}

Vec3 leg_forward_kinematics(const RobotParams& params, int leg, const Vec3& q) {
  return PlaneToBody(params, leg, q, LinkPlanar(params, 3, q));
}

Mat3 foot_jacobian(const RobotParams& params, int leg, const Vec3& q) {
  return PlaneJacobian(leg, q, LinkPlanar(params, 3, q));
}

Vec3 link_com_position(const RobotParams& params, int leg, int link,
                       const Vec3& q) {
  if (link == 0) {
    return params.hip_positions[leg] +
           Vec3(0.5 * LegFore(leg) * params.link_lengths[0], 0.0, 0.0);
  }
  return PlaneToBody(params, leg, q, LinkPlanar(params, link, q));
}

Mat3 link_com_jacobian(const RobotParams& params, int leg, int link,
                       const Vec3& q) {
  if (link == 0) return Mat3::Zero();
  return PlaneJacobian(leg, q, LinkPlanar(params, link, q));
}

Vec3 leg_inverse_kinematics(const RobotParams& params, int leg, const Vec3& p) {
  const double side = LegSide(leg);
  const double l1 = params.link_lengths[1], l2 = params.link_lengths[2];
  const Vec3 d = p - hfe_position(params, leg);
  // R_x(side*q0) maps (A, 0, B) with B < 0 onto d
  const double q0 = side * std::atan2(d.y(), -d.z());
  const double b = -std::hypot(d.y(), d.z());
  const double x = -b, y = -d.x();  // planar chain measured from straight down
  double r2 = x * x + y * y;
  const double rmax = l1 + l2, rmin = std::abs(l1 - l2);
  double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  c2 = std::clamp(c2, (rmin * rmin - l1 * l1 - l2 * l2) / (2.0 * l1 * l2),
                  (rmax * rmax - l1 * l1 - l2 * l2) / (2.0 * l1 * l2));
  const double q2 = -std::acos(std::clamp(c2, -1.0, 1.0));
  const double q1 =
      std::atan2(y, x) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  return Vec3(q0, q1, q2);
}

Vec3 leg_bias_term(const RobotParams& params, int leg, const Vec3& q,
                   const Vec3& q_dot) {
  return leg_bias_term(params, leg, q, q_dot,
                       Vec3(0.0, 0.0, params.gravity_magnitude));
}

Vec3 leg_bias_term(const RobotParams& params, int leg, const Vec3& q,
                   const Vec3& q_dot, const Vec3& g_b) {
  Vec3 h = Vec3::Zero();
  for (int link = 0; link < 3; ++link) {
    const double m = params.link_masses[link];
    if (m == 0.0) continue;
    const Mat3 j = link_com_jacobian(params, leg, link, q);
    h += j.transpose() * (m * g_b);
    if (params.coriolis_terms && q_dot.squaredNorm() > 0.0) {
      const double delta = 1e-6;
      const Mat3 j_dot = (link_com_jacobian(params, leg, link, q + delta * q_dot) -
                          link_com_jacobian(params, leg, link, q - delta * q_dot)) /
                         (2.0 * delta);
      h += m * j.transpose() * (j_dot * q_dot);
    }
  }
  return h;
}

Mat3 guarded_inverse(const Mat3& m, double max_cond) {
  Mat3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) +
                     m(0, 2) * adj(2, 0);
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error(ErrorCode::kSingularJacobian, "zero determinant");
  }
  const Mat3 inv = adj / det;
  const double cond = m.norm() * inv.norm();
  if (!(cond <= max_cond)) {
    throw Error(ErrorCode::kSingularJacobian, "condition number above bound");
  }
  return inv;
}

bool detect_contact(double force_norm, const ContactDetectorConfig& config,
                    bool prev_alpha) {
  if (config.mode == ContactDetectorConfig::Mode::kPlain) {
    return force_norm > config.epsilon;
  }
  const double half = 0.5 * config.hysteresis_band;
  return prev_alpha ? force_norm > config.epsilon - half
                    : force_norm > config.epsilon + half;
}

ContactEstimate estimate_grf(const RobotParams& params, int leg,
                             const LegState& state,
                             const ContactDetectorConfig& detector,
                             bool prev_alpha) {
  const Mat3 j = foot_jacobian(params, leg, state.q);
  const Mat3 jt_inv = guarded_inverse(j.transpose());
  const Vec3 h = leg_bias_term(params, leg, state.q, state.q_dot);
  const Vec3 f = -(jt_inv * (state.tau - h));
  ContactEstimate out;
  out.force_norm = f.norm();
  out.alpha = detect_contact(out.force_norm, detector, prev_alpha);
  out.grf = out.alpha ? f : Vec3::Zero();
  return out;
}

Vec3 torques_for_foot_force(const RobotParams& params, int leg,
                            const LegState& state, const Vec3& f_b) {
  return leg_bias_term(params, leg, state.q, state.q_dot) -
         foot_jacobian(params, leg, state.q).transpose() * f_b;
}

}  // namespace softstride
