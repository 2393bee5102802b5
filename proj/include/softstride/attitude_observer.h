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

#ifndef SOFTSTRIDE_ATTITUDE_OBSERVER_H_
#define SOFTSTRIDE_ATTITUDE_OBSERVER_H_

#include <vector>

#include "softstride/so3.h"

namespace softstride {

// Known reference direction in N and its measurement in B, both unit norm.
struct VectorMeasurementPair {
  Vec3 y_n = Vec3::UnitZ();
  Vec3 y_b = Vec3::UnitZ();
  // multiplies the XKF measurement covariance for this pair
  double variance_scale = 1.0;
};

struct NloState {
  RotationMatrix r_hat = RotationMatrix::Identity();
  Vec3 b_hat = Vec3::Zero();
};

struct NloGains {
  Mat3 k_p = Mat3::Identity() * 50.0;
  double k = 0.5;
  double sigma = 1.0;
  double m_b = 0.05;

  void Validate() const;
};

// Error state about the NLO estimate: x = [theta; db] with
// R = R_nlo Exp(theta) and b = b_nlo + db.
struct XkfState {
  Vec6 x_hat = Vec6::Zero();
  Mat6 p = Mat6::Identity() * 1e-2;
};

// J_s = sum (y_n - R_hat y_b) y_b^T; throws kNoMeasurements if empty
Mat3 injection_term(const RotationMatrix& r_hat,
                    const std::vector<VectorMeasurementPair>& measurements);

// One Euler/exponential step of the observer. With no measurements the
// step is a pure gyro prediction.
NloState nlo_step(const NloState& state, const NloGains& gains,
                  const Vec3& gyro,
                  const std::vector<VectorMeasurementPair>& measurements,
                  double dt);

// True if the minimum eigenvalue of the windowed integral of y y^T is at
// least gamma for every window of length T (trapezoidal rule).
// throws kInsufficientHistory if the samples span less than T.
bool pe_check(const std::vector<double>& times, const std::vector<Vec3>& y_n,
              double window, double gamma);

// exo_prev/exo_cur: NLO estimate at the start and end of the step.
// r_meas: per-pair direction covariance. throws kCovarianceNotPD.
XkfState xkf_step(const XkfState& xkf, const NloState& exo_prev,
                  const NloState& exo_cur, const Vec3& gyro,
                  const std::vector<VectorMeasurementPair>& measurements,
                  const Mat6& q, const Mat3& r_meas, double dt);

RotationMatrix corrected_attitude(const NloState& exo, const XkfState& xkf);

}  // namespace softstride

#endif  // SOFTSTRIDE_ATTITUDE_OBSERVER_H_
