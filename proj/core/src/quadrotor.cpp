/*
 Copyright 2026 The COP Planner Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "cop/quadrotor.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "cop/errors.hpp"

namespace cop {

namespace {

constexpr double kUnitQuaternionTolerance = 1e-6;

void require_unit(const Vec4& q) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= kUnitQuaternionTolerance)) {
    throw DomainError("quaternion is not unit length (norm " + std::to_string(n) + ")");
  }
}

}  // namespace

void ParamVector::validate() const {
  if (!(kf > 0.0) || !(km > 0.0)) {
    throw DomainError("k_f and k_m must be strictly positive");
  }
}

void PhysicalConstants::validate() const {
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  if (!(arm_length > 0.0)) throw DomainError("arm length must be positive");
  if (!(gravity > 0.0)) throw DomainError("gravity must be positive");
  if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
    throw DomainError("inertia must be symmetric");
  }
  Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success) throw DomainError("inertia must be positive definite");
}

void RotorBounds::validate() const {
  if (!(u_min >= 0.0) || !(u_max > u_min)) {
    throw DomainError("rotor bounds must satisfy 0 <= u_min < u_max");
  }
}

State13 make_state(const Vec3& r, const Vec3& v, const Vec4& q, const Vec3& w) {
  State13 x;
  x << r, v, q, w;
  return x;
}

State13 hover_state(const Vec3& r) {
  return make_state(r, Vec3::Zero(), Vec4(1, 0, 0, 0), Vec3::Zero());
}

void normalize_quaternion(State13& x) {
  auto q = x.segment<4>(state_index::kQuaternion);
  const double n = q.norm();
  if (!(n > 1e-12)) throw DomainError("cannot normalize a zero quaternion");
  q /= n;
}

Vec3 quat_rotate(const Vec4& q, const Vec3& v) {
  require_unit(q);
  const Vec4 qv(0.0, v(0), v(1), v(2));
  const Vec4 q_conj(q(0), -q(1), -q(2), -q(3));
  const Vec4 out = quat_multiply<double>(quat_multiply<double>(q, qv), q_conj);
  return out.tail<3>();
}

Vec4 quat_from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw DomainError("rotation axis must be non-zero");
  const Vec3 a = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * a(0), s * a(1), s * a(2)};
}

double yaw_from_quaternion(const Vec4& q) {
  // R = Rz(yaw) Rx(roll) Ry(pitch)
  const Mat3 R = rotation_matrix<double>(q);
  return std::atan2(-R(0, 1), R(1, 1));
}

Mat4 allocation_matrix(const ParamVector& p, const PhysicalConstants& c) {
  return allocation_matrix<double>(p.kf, p.km, c.arm_length);
}

Wrench allocation_forward(const RotorInput& u, const ParamVector& p, const PhysicalConstants& c) {
  const Vec4 w = allocation_matrix(p, c) * u;
  return {w(0), w.tail<3>()};
}

RotorInput allocation_inverse(const Wrench& w, const ParamVector& p, const PhysicalConstants& c) {
  if (!(p.kf != 0.0) || !(p.km != 0.0) || !(c.arm_length != 0.0)) {
    throw DomainError("allocation matrix is singular (zero k_f, k_m or arm length)");
  }
  // Closed-form inverse of the plus-configuration allocation matrix.
  const double kf = p.kf;
  const double l = c.arm_length;
  const double f = w.thrust / kf;
  const double tx = w.torque(0) / (kf * l);
  const double ty = w.torque(1) / (kf * l);
  const double tz = w.torque(2) / (kf * p.km);
  RotorInput u;
  u(0) = 0.25 * (f + tz) - 0.5 * ty;
  u(1) = 0.25 * (f - tz) + 0.5 * tx;
  u(2) = 0.25 * (f + tz) + 0.5 * ty;
  u(3) = 0.25 * (f - tz) - 0.5 * tx;
  return u;
}

State13 dynamics(const State13& x, const RotorInput& u, const ParamVector& p,
                 const PhysicalConstants& c) {
  return dynamics_t<double>(x, u, p.kf, p.km, c);
}

double hover_input(const ParamVector& p, const PhysicalConstants& c) {
  return c.mass * c.gravity / (4.0 * p.kf);
}

}  // namespace cop
