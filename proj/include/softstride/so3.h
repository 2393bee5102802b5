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

#ifndef SOFTSTRIDE_SO3_H_
#define SOFTSTRIDE_SO3_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace softstride {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Attitude of B in N. Invariant checked by IsRotation().
using RotationMatrix = Mat3;

inline constexpr double kTolSkew = 1e-6;
inline constexpr double kTolDet = 1e-12;

// cross-product matrix: skew(v) * w == v.cross(w)
Mat3 skew(const Vec3& v);

// inverse of skew; throws kNotSkewSymmetric if |M + M^T|_F >= tol
Vec3 vex(const Mat3& m, double tol = kTolSkew);

Mat3 symmetrize(const Mat3& m);  // (M + M^T) / 2
Mat3 skew_part(const Mat3& m);   // (M - M^T) / 2

// elementwise clamp to [-1, 1]
Mat3 sat_elements(const Mat3& m);

// Rodrigues exponential of a rotation vector
Mat3 exp_so3(const Vec3& phi);

// principal logarithm, |result| <= pi
Vec3 log_so3(const Mat3& r);

// R * Exp(S(omega * dt)); throws kInvalidArgument unless dt > 0
RotationMatrix integrate_rotation(const RotationMatrix& r, const Vec3& omega,
                                  double dt);

// nearest rotation in the polar sense (Newton iteration X <- (X + X^-T)/2)
// throws kDegenerateMatrix if det(M) <= tol_det
RotationMatrix orthonormalize(const Mat3& m, double tol_det = kTolDet);

bool is_rotation(const Mat3& r, double tol = 1e-9);

// angle of R_a^T R_b in radians
double rotation_angle_between(const Mat3& a, const Mat3& b);

}  // namespace softstride

#endif  // SOFTSTRIDE_SO3_H_
