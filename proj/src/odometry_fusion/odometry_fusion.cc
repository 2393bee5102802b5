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

#include "softstride/odometry_fusion.h"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "softstride/error.h"

namespace softstride {

Mat6 FusionConfig::DefaultQ() {
  Mat6 q = Mat6::Zero();
  q.block<3, 3>(0, 0) = Mat3::Identity() * 1e-6;
  q.block<3, 3>(3, 3) = Mat3::Identity() * 1e-3;
  return q;
}

void FusionConfig::Validate() const {
  const bool q_ok = (q - q.transpose()).norm() < 1e-12 &&
                    (q + Mat6::Identity() * 1e-15).llt().info() == Eigen::Success;
  const bool r_ok = (r_meas - r_meas.transpose()).norm() < 1e-12 &&
                    r_meas.llt().info() == Eigen::Success;
  if (!q_ok || !r_ok || !g_n.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid FusionConfig");
  }
}

bool is_symmetric_pd(const Mat6& p, double sym_tol) {
  if (!p.allFinite() || (p - p.transpose()).norm() > sym_tol) return false;
  return p.llt().info() == Eigen::Success;
}

OdometryResult leg_odometry(const std::array<LegState, kNumLegs>& legs,
                            const std::array<ContactEstimate, kNumLegs>& contacts,
                            const Vec3& omega_b, const RobotParams& params) {
  OdometryResult out;
  Vec3 sum = Vec3::Zero();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!contacts[leg].alpha) continue;
    const Vec3 x = leg_forward_kinematics(params, leg, legs[leg].q);
    const Mat3 j = foot_jacobian(params, leg, legs[leg].q);
    out.per_leg[leg] = -(j * legs[leg].q_dot + omega_b.cross(x));
    sum += out.per_leg[leg];
    ++out.n_stance;
  }
  out.valid = out.n_stance > 0;
  if (out.valid) out.v_b = sum / static_cast<double>(out.n_stance);
  return out;
}

FusionState kf_predict(const FusionState& state, const RotationMatrix& r_hat,
                       const Vec3& f_s_b, const FusionConfig& config,
                       double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kf_predict needs dt > 0");
  }
  const Vec3 u = r_hat * f_s_b + config.g_n;
  FusionState out;
  out.x_n = state.x_n + state.v_n * dt + 0.5 * u * dt * dt;
  out.v_n = state.v_n + u * dt;
  Mat6 c = Mat6::Zero();
  c.block<3, 3>(0, 3) = Mat3::Identity();
  const Mat6 p = state.p + dt * (c * state.p + state.p * c.transpose() + config.q);
  out.p = 0.5 * (p + p.transpose());
  return out;
}

FusionState kf_update(const FusionState& state, const OdometryResult& odo,
                      const RotationMatrix& r_hat, const FusionConfig& config) {
  if (!odo.valid) return state;
  const Vec3 z = r_hat * odo.v_b;
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h.block<3, 3>(0, 3) = Mat3::Identity();
  const Mat3 s = h * state.p * h.transpose() + config.r_meas;
  const Eigen::Matrix<double, 6, 3> k =
      state.p * h.transpose() * s.ldlt().solve(Mat3::Identity());
  const Vec3 innov = z - state.v_n;

  FusionState out;
  out.x_n = state.x_n + k.topRows<3>() * innov;
  out.v_n = state.v_n + k.bottomRows<3>() * innov;
  const Mat6 ikh = Mat6::Identity() - k * h;
  Mat6 p = ikh * state.p * ikh.transpose() + k * config.r_meas * k.transpose();
  out.p = 0.5 * (p + p.transpose());
  if (!is_symmetric_pd(out.p)) {
    throw Error(ErrorCode::kCovarianceNotPD, "fusion covariance not PD");
  }
  return out;
}

}  // namespace softstride
