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

#include "softstride/so3.h"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "softstride/error.h"

namespace softstride {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotSkewSymmetric: return "NotSkewSymmetric";
    case ErrorCode::kDegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::kSingularJacobian: return "SingularJacobian";
    case ErrorCode::kNoMeasurements: return "NoMeasurements";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kCovarianceNotPD: return "CovarianceNotPD";
    case ErrorCode::kOutOfRegion: return "OutOfRegion";
    case ErrorCode::kNumericalInstability: return "NumericalInstability";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyOverlap: return "EmptyOverlap";
  }
  return "Unknown";
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vex(const Mat3& m, double tol) {
  if ((m + m.transpose()).norm() >= tol) {
    throw Error(ErrorCode::kNotSkewSymmetric, "vex of a non-skew matrix");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 symmetrize(const Mat3& m) { return 0.5 * (m + m.transpose()); }

Mat3 skew_part(const Mat3& m) { return 0.5 * (m - m.transpose()); }

Mat3 sat_elements(const Mat3& m) {
  return m.cwiseMax(-1.0).cwiseMin(1.0);
}

Mat3 exp_so3(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const Mat3 k = skew(phi);
  double a, b;
  if (theta2 < 1e-8) {
    // Taylor terms for sin(t)/t and (1-cos t)/t^2
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_so3(const Mat3& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-6) {
    return 0.5 * (1.0 + theta * theta / 6.0) * w;
  }
  if (M_PI - theta > 1e-6) {
    return theta / (2.0 * std::sin(theta)) * w;
  }
  // near pi: axis from the symmetric part, R = 2 a a^T - I
  const Mat3 s = 0.5 * (r + Mat3::Identity());
  int i = 0;
  s.diagonal().maxCoeff(&i);
  Vec3 axis = s.col(i) / std::sqrt(std::max(s(i, i), 1e-300));
  axis.normalize();
  if (axis.dot(w) < 0.0) axis = -axis;
  return theta * axis;
}

RotationMatrix integrate_rotation(const RotationMatrix& r, const Vec3& omega,
                                  double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integrate_rotation needs dt > 0");
  }
  return r * exp_so3(omega * dt);
}

RotationMatrix orthonormalize(const Mat3& m, double tol_det) {
  if (!(m.determinant() > tol_det)) {
    throw Error(ErrorCode::kDegenerateMatrix, "determinant below tolerance");
  }
  Mat3 x = m;
  for (int it = 0; it < 50; ++it) {
    const Mat3 next = 0.5 * (x + x.inverse().transpose());
    const double delta = (next - x).norm();
    x = next;
    if (delta < 1e-15) break;
  }
  return x;
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  return (r.transpose() * r - Mat3::Identity()).norm() < tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  return log_so3(a.transpose() * b).norm();
}

}  // namespace softstride
