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

#include "softstride/attitude_observer.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "softstride/error.h"

namespace softstride {

void NloGains::Validate() const {
  const bool sym = (k_p - k_p.transpose()).norm() < 1e-12;
  const bool pd = sym && Eigen::SelfAdjointEigenSolver<Mat3>(k_p)
                                 .eigenvalues()
                                 .minCoeff() > 0.0;
  if (!pd || !(k > 0.0) || !(sigma >= 1.0) || !(m_b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid NloGains");
  }
}

Mat3 injection_term(const RotationMatrix& r_hat,
                    const std::vector<VectorMeasurementPair>& measurements) {
  if (measurements.empty()) {
    throw Error(ErrorCode::kNoMeasurements, "injection term needs a pair");
  }
  Mat3 j = Mat3::Zero();
  for (const auto& m : measurements) {
    j += (m.y_n - r_hat * m.y_b) * m.y_b.transpose();
  }
  return j;
}

NloState nlo_step(const NloState& state, const NloGains& gains,
                  const Vec3& gyro,
                  const std::vector<VectorMeasurementPair>& measurements,
                  double dt) {
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw Error(ErrorCode::kInvalidArgument, "nlo_step dt out of range");
  }
  const Mat3 j_s = measurements.empty()
                       ? Mat3::Zero()
                       : injection_term(state.r_hat, measurements);

  NloState next;
  const Mat3 pred = integrate_rotation(state.r_hat, gyro - state.b_hat, dt);
  next.r_hat = orthonormalize(pred + gains.sigma * gains.k_p * j_s * dt);

  const Mat3 inner = sat_elements(state.r_hat).transpose() * gains.k_p * j_s;
  Vec3 b = state.b_hat - dt * gains.k * vex(skew_part(inner));
  const double n = b.norm();
  if (n > gains.m_b) b *= gains.m_b / n;
  next.b_hat = b;
  return next;
}

bool pe_check(const std::vector<double>& times, const std::vector<Vec3>& y_n,
              double window, double gamma) {
  if (times.size() != y_n.size() || times.size() < 2 ||
      times.back() - times.front() < window) {
    throw Error(ErrorCode::kInsufficientHistory, "history shorter than window");
  }
  const size_t n = times.size();
  // cumulative trapezoid of y y^T
  std::vector<Mat3> cum(n, Mat3::Zero());
  for (size_t i = 1; i < n; ++i) {
    const double h = times[i] - times[i - 1];
    cum[i] = cum[i - 1] + 0.5 * h *
                              (y_n[i - 1] * y_n[i - 1].transpose() +
                               y_n[i] * y_n[i].transpose());
  }
  size_t end = 0;
  for (size_t start = 0; start < n; ++start) {
    const double t_end = times[start] + window;
    if (t_end > times.back() + 1e-12) break;
    end = std::max(end, start);
    while (end < n && times[end] < t_end - 1e-12) ++end;
    if (end >= n) end = n - 1;
    const Mat3 integral = cum[end] - cum[start];
    const double lam =
        Eigen::SelfAdjointEigenSolver<Mat3>(symmetrize(integral))
            .eigenvalues()
            .minCoeff();
    if (lam < gamma) return false;
  }
  return true;
}

XkfState xkf_step(const XkfState& xkf, const NloState& exo_prev,
                  const NloState& exo_cur, const Vec3& gyro,
                  const std::vector<VectorMeasurementPair>& measurements,
                  const Mat6& q, const Mat3& r_meas, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "xkf_step needs dt > 0");
  }
  const Vec3 w = gyro - exo_prev.b_hat;
  const Vec3 theta = xkf.x_hat.head<3>();
  const Vec3 db = xkf.x_hat.tail<3>();

  // mean: exact composition about the exogenous trajectory
  XkfState out;
  const Mat3 nominal =
      exo_cur.r_hat.transpose() * exo_prev.r_hat * exp_so3(w * dt);
  out.x_hat.head<3>() = log_so3(nominal) + exp_so3(-w * dt) * theta - dt * db;
  out.x_hat.tail<3>() = exo_prev.b_hat - exo_cur.b_hat + db;

  Mat6 c = Mat6::Zero();
  c.block<3, 3>(0, 0) = -skew(w);
  c.block<3, 3>(0, 3) = -Mat3::Identity();
  Mat6 p = xkf.p + dt * (c * xkf.p + xkf.p * c.transpose() + q);
  p = 0.5 * (p + p.transpose());

  const int m = static_cast<int>(measurements.size());
  if (m > 0) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * m, 6);
    Eigen::VectorXd innov(3 * m);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(3 * m, 3 * m);
    for (int i = 0; i < m; ++i) {
      const auto& meas = measurements[i];
      const Vec3 pred = exo_cur.r_hat.transpose() * meas.y_n;
      h.block<3, 3>(3 * i, 0) = skew(pred);
      r.block<3, 3>(3 * i, 3 * i) = r_meas * meas.variance_scale;
      innov.segment<3>(3 * i) =
          meas.y_b - pred - h.block<3, 3>(3 * i, 0) * out.x_hat.head<3>();
    }
    const Eigen::MatrixXd s = h * p * h.transpose() + r;
    const Eigen::MatrixXd k = p * h.transpose() * s.ldlt().solve(
                                  Eigen::MatrixXd::Identity(3 * m, 3 * m));
    out.x_hat += k * innov;
    const Mat6 ikh = Mat6::Identity() - k * h;
    p = ikh * p * ikh.transpose() + k * r * k.transpose();
    p = 0.5 * (p + p.transpose());
  }
  if (!p.allFinite() ||
      Eigen::SelfAdjointEigenSolver<Mat6>(p).eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kCovarianceNotPD, "XKF covariance lost definiteness");
  }
  out.p = p;
  return out;
}

RotationMatrix corrected_attitude(const NloState& exo, const XkfState& xkf) {
  return orthonormalize(exo.r_hat * exp_so3(xkf.x_hat.head<3>()));
}

}  // namespace softstride
