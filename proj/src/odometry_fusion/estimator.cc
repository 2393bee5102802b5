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

#include "softstride/estimator.h"

#include <cmath>
#include <vector>

namespace softstride {

Mat6 EstimatorConfig::DefaultXkfQ() {
  Mat6 q = Mat6::Zero();
  q.block<3, 3>(0, 0) = Mat3::Identity() * 1e-6;
  q.block<3, 3>(3, 3) = Mat3::Identity() * 1e-9;
  return q;
}

NloGains EstimatorConfig::TrottingNloGains() {
  NloGains g;
  g.k_p = Mat3::Identity();
  return g;
}

EstimatorState InitialEstimatorState(const Vec3& x0, const RotationMatrix& r0) {
  EstimatorState s;
  s.attitude.nlo.r_hat = r0;
  s.attitude.r_hat = r0;
  s.attitude.xkf.p.block<3, 3>(0, 0) = Mat3::Identity() * 1e-4;
  s.attitude.xkf.p.block<3, 3>(3, 3) = Mat3::Identity() * 1e-6;
  s.fusion.x_n = x0;
  return s;
}

StepResult estimator_pipeline_step(const EstimatorConfig& config,
                                   const EstimatorState& prior,
                                   const ImuSample& imu,
                                   const std::array<LegState, kNumLegs>& legs,
                                   double dt) {
  StepResult out;
  out.state = prior;
  Diagnostics& diag = out.diagnostics;
  try {
    EstimatorState next = prior;

    std::array<ContactEstimate, kNumLegs> contacts;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (!legs[leg].AllFinite()) {
        diag.leg_excluded[leg] = true;
        continue;
      }
      try {
        contacts[leg] = estimate_grf(config.robot, leg, legs[leg],
                                     config.detector, prior.alpha[leg]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularJacobian) throw;
        diag.leg_excluded[leg] = true;
        contacts[leg] = ContactEstimate{};
      }
      next.alpha[leg] = contacts[leg].alpha;
      diag.alpha[leg] = contacts[leg].alpha;
      diag.grf[leg] = contacts[leg].grf;
      diag.force_norm[leg] = contacts[leg].force_norm;
    }

    std::vector<VectorMeasurementPair> meas;
    const double f_norm = imu.accel.norm();
    if (f_norm > 1e-9) {
      VectorMeasurementPair pair;
      pair.y_n = Vec3::UnitZ();
      pair.y_b = imu.accel / f_norm;
      const double g = config.robot.gravity_magnitude;
      if (std::abs(f_norm - g) > config.accel_gate * g) {
        pair.variance_scale = config.accel_downweight;
      }
      meas.push_back(pair);
    }
    const NloState nlo =
        nlo_step(prior.attitude.nlo, config.nlo, imu.gyro, meas, dt);
    next.attitude.nlo = nlo;
    if (config.use_xkf) {
      next.attitude.xkf = xkf_step(prior.attitude.xkf, prior.attitude.nlo, nlo,
                                   imu.gyro, meas, config.xkf_q, config.xkf_r,
                                   dt);
      next.attitude.r_hat = corrected_attitude(nlo, next.attitude.xkf);
    } else {
      next.attitude.r_hat = nlo.r_hat;
    }

    const Vec3 bias = config.use_xkf
                          ? Vec3(nlo.b_hat + next.attitude.xkf.x_hat.tail<3>())
                          : nlo.b_hat;
    diag.odometry =
        leg_odometry(legs, contacts, imu.gyro - bias, config.robot);

    next.fusion = kf_predict(prior.fusion, next.attitude.r_hat, imu.accel,
                             config.fusion, dt);
    next.fusion = kf_update(next.fusion, diag.odometry, next.attitude.r_hat,
                            config.fusion);
    if (!next.fusion.x_n.allFinite() || !next.fusion.v_n.allFinite()) {
      throw Error(ErrorCode::kNumericalInstability, "non-finite fusion state");
    }
    out.state = next;
  } catch (const Error& e) {
    out.state = prior;
    diag.error = e.code();
  }
  return out;
}

}  // namespace softstride
