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

#include "cop/controller.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "cop/errors.hpp"

namespace cop {

void ControllerGains::validate() const {
  for (const Vec3* k : {&k_r, &k_v, &k_i, &k_q, &k_w}) {
    if (!(k->minCoeff() > 0.0)) throw DomainError("controller gains must be positive");
  }
}

Vec3 vee(const Mat3& S) { return {S(2, 1), S(0, 2), S(1, 0)}; }

Vec3 attitude_error(const Mat3& R_d, const Vec4& q) {
  if (!(std::abs(R_d.determinant() - 1.0) < 1e-6) ||
      !(R_d.transpose() * R_d).isApprox(Mat3::Identity(), 1e-6)) {
    throw DomainError("desired attitude is not a rotation matrix");
  }
  const Mat3 R = rotation_matrix<double>(q);
  return 0.5 * vee(R_d.transpose() * R - R.transpose() * R_d);
}

Mat3 desired_attitude(const Vec3& f_vec, double yaw, double thrust_epsilon) {
  const double norm = f_vec.norm();
  if (!(norm > thrust_epsilon)) {
    throw DegenerateThrustError("desired force is too small to define an attitude");
  }
  const Vec3 b3 = f_vec / norm;
  const Vec3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  Vec3 b2 = b3.cross(heading);
  const double b2_norm = b2.norm();
  if (!(b2_norm > 1e-9)) {
    throw DegenerateThrustError("desired thrust is parallel to the yaw heading");
  }
  b2 /= b2_norm;
  const Vec3 b1 = b2.cross(b3);
  Mat3 R_d;
  R_d << b1, b2, b3;
  return R_d;
}

ControlOutput control(const Vec3& xi, const State13& x, const ReferencePoint& ref,
                      const ControllerGains& gains, const ParamVector& p_c,
                      const PhysicalConstants& c, const ControllerOptions& options,
                      bool apply_limits) {
  const Vec3 e_r = position(x) - ref.position.head<3>();
  const Vec3 e_v = velocity(x) - ref.velocity.head<3>();
  const Vec4 q = quaternion(x);
  const Vec3 w = body_rate(x);

  Vec3 f_vec = -gains.k_r.cwiseProduct(e_r) - gains.k_v.cwiseProduct(e_v) -
               gains.k_i.cwiseProduct(xi) + c.mass * ref.acceleration.head<3>();
  f_vec(2) += c.mass * c.gravity;

  const Mat3 R = rotation_matrix<double>(q);
  const Mat3 R_d = desired_attitude(f_vec, ref.position(3), options.thrust_epsilon);
  const Vec3 e_q = 0.5 * vee(R_d.transpose() * R - R.transpose() * R_d);

  ControlOutput out;
  out.thrust = f_vec.dot(R.col(2));
  out.torque = -gains.k_q.cwiseProduct(e_q) - gains.k_w.cwiseProduct(w);
  out.u_raw = allocation_inverse({out.thrust, out.torque}, p_c, c);
  out.u = out.u_raw;
  out.xi_dot = e_r;
  if (apply_limits) {
    out.u = out.u_raw.cwiseMax(options.bounds.u_min).cwiseMin(options.bounds.u_max);
    out.saturated = (out.u.array() != out.u_raw.array()).any();
    for (int i = 0; i < 3; ++i) {
      if (std::abs(xi(i)) >= options.integrator_limit && xi(i) * e_r(i) > 0.0) {
        out.xi_dot(i) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace cop
