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

#ifndef COP_QUADROTOR_HPP
#define COP_QUADROTOR_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "cop/types.hpp"

namespace cop {

/// Layout of the 13-dimensional quadrotor state [r, v, q, w].
///
/// r and v are world-frame position and velocity, q is the unit
/// Hamiltonian quaternion (w, x, y, z) rotating body vectors into the world
/// frame, and w is the body-frame angular velocity.
namespace state_index {
inline constexpr int kPosition = 0;
inline constexpr int kVelocity = 3;
inline constexpr int kQuaternion = 6;
inline constexpr int kRate = 10;
inline constexpr int kSize = 13;
}  // namespace state_index

using State13 = Eigen::Matrix<double, state_index::kSize, 1>;
template <typename T>
using State13T = Eigen::Matrix<T, state_index::kSize, 1>;

/// Squared rotor speeds (w1^2, w2^2, w3^2, w4^2) in rad^2/s^2.
using RotorInput = Eigen::Vector4d;

/// Uncertain aerodynamic parameters p = [k_f, k_m].
struct ParamVector {
  double kf = 3.375e-4;  ///< rotor thrust force coefficient
  double km = 0.016;     ///< drag moment coefficient

  Eigen::Vector2d as_vector() const { return {kf, km}; }
  static ParamVector from_vector(const Eigen::Vector2d& p) { return {p(0), p(1)}; }
  void validate() const;
};

/// Rigid-body constants. Defaults are plausible Hummingbird-class values,
/// not measured ones.
struct PhysicalConstants {
  double mass = 0.68;
  Mat3 inertia = Eigen::Vector3d(7e-3, 7e-3, 12e-3).asDiagonal();
  double arm_length = 0.17;
  double gravity = 9.81;

  void validate() const;
};

struct RotorBounds {
  double u_min = 0.0;
  double u_max = 1.5e4;

  void validate() const;
};

struct Wrench {
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();
};

State13 make_state(const Vec3& r, const Vec3& v, const Vec4& q, const Vec3& w);
/// Hover state at rest with identity attitude.
State13 hover_state(const Vec3& r);

inline Vec3 position(const State13& x) { return x.segment<3>(state_index::kPosition); }
inline Vec3 velocity(const State13& x) { return x.segment<3>(state_index::kVelocity); }
inline Vec4 quaternion(const State13& x) { return x.segment<4>(state_index::kQuaternion); }
inline Vec3 body_rate(const State13& x) { return x.segment<3>(state_index::kRate); }

/// Renormalizes the quaternion block in place. Throws DomainError for a
/// (near) zero quaternion.
void normalize_quaternion(State13& x);

/// Hamilton product a (x) b, scalar-first.
template <typename T>
Vec4T<T> quat_multiply(const Vec4T<T>& a, const Vec4T<T>& b) {
  return Vec4T<T>(a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3),
                  a(0) * b(1) + a(1) * b(0) + a(2) * b(3) - a(3) * b(2),
                  a(0) * b(2) - a(1) * b(3) + a(2) * b(0) + a(3) * b(1),
                  a(0) * b(3) + a(1) * b(2) - a(2) * b(1) + a(3) * b(0));
}

/// Body-to-world rotation matrix of a unit quaternion (w, x, y, z).
template <typename T>
Mat3T<T> rotation_matrix(const Vec4T<T>& q) {
  const T w = q(0), x = q(1), y = q(2), z = q(3);
  const T two(2);
  Mat3T<T> R;
  R << T(1) - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y),
      two * (x * y + w * z), T(1) - two * (x * x + z * z), two * (y * z - w * x),
      two * (x * z - w * y), two * (y * z + w * x), T(1) - two * (x * x + y * y);
  return R;
}

/// Rotates v by the unit quaternion q using q (x) v (x) q^-1.
Vec3 quat_rotate(const Vec4& q, const Vec3& v);

/// Unit quaternion for a rotation of angle (rad) about a unit axis.
Vec4 quat_from_axis_angle(const Vec3& axis, double angle);

/// Yaw of the 3-1-2 (yaw first) Tait-Bryan decomposition of q.
double yaw_from_quaternion(const Vec4& q);

/// Allocation matrix S mapping squared rotor speeds to [f, tau].
///
///   S = k_f [ 1     1     1     1
///             0     l     0    -l
///            -l     0     l     0
///             k_m  -k_m   k_m  -k_m ]
template <typename T>
Eigen::Matrix<T, 4, 4> allocation_matrix(const T& kf, const T& km, double arm) {
  const T l(arm);
  const T zero(0);
  Eigen::Matrix<T, 4, 4> S;
  S << kf, kf, kf, kf,
      zero, kf * l, zero, -kf * l,
      -kf * l, zero, kf * l, zero,
      kf * km, -kf * km, kf * km, -kf * km;
  return S;
}

Mat4 allocation_matrix(const ParamVector& p, const PhysicalConstants& c);
Wrench allocation_forward(const RotorInput& u, const ParamVector& p, const PhysicalConstants& c);
RotorInput allocation_inverse(const Wrench& w, const ParamVector& p, const PhysicalConstants& c);

/// Rigid-body dynamics for any scalar type (double or dual numbers).
///
/// r' = v, v' = -g z_W + (f/m) R(q) z_W, q' = 1/2 q (x) (0, w),
/// w' = J^-1 (tau - w x J w), with (f, tau) = S(k_f, k_m) u.
template <typename T>
State13T<T> dynamics_t(const State13T<T>& x, const Vec4T<T>& u, const T& kf, const T& km,
                       const PhysicalConstants& c) {
  using namespace state_index;
  const Eigen::Matrix<T, 4, 1> wrench = allocation_matrix<T>(kf, km, c.arm_length) * u;
  const Vec4T<T> q = x.template segment<4>(kQuaternion);
  const Vec3T<T> w = x.template segment<3>(kRate);
  const Mat3T<T> R = rotation_matrix<T>(q);
  const Mat3T<T> J = c.inertia.template cast<T>();
  const Mat3T<T> J_inv = c.inertia.inverse().template cast<T>();

  State13T<T> dx;
  dx.template segment<3>(kPosition) = x.template segment<3>(kVelocity);
  const T thrust_over_mass = wrench(0) / T(c.mass);
  dx.template segment<3>(kVelocity) = R.col(2) * thrust_over_mass;
  dx(kVelocity + 2) -= T(c.gravity);
  const Vec4T<T> omega_quat(T(0), w(0), w(1), w(2));
  dx.template segment<4>(kQuaternion) = quat_multiply<T>(q, omega_quat) * T(0.5);
  const Vec3T<T> torque = wrench.template tail<3>();
  dx.template segment<3>(kRate) = J_inv * (torque - w.cross(J * w));
  return dx;
}

State13 dynamics(const State13& x, const RotorInput& u, const ParamVector& p,
                 const PhysicalConstants& c);

/// Squared rotor speed per motor that balances gravity.
double hover_input(const ParamVector& p, const PhysicalConstants& c);

}  // namespace cop

#endif  // COP_QUADROTOR_HPP
