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

#ifndef COP_CONTROLLER_HPP
#define COP_CONTROLLER_HPP

#include "cop/quadrotor.hpp"
#include "cop/types.hpp"

namespace cop {

/// Diagonal gains of the geometric tracking controller.
struct ControllerGains {
  Vec3 k_r = Vec3::Constant(6.0);
  Vec3 k_v = Vec3::Constant(4.0);
  Vec3 k_i = Vec3::Constant(0.05);
  Vec3 k_q = Vec3::Constant(1.2);
  Vec3 k_w = Vec3::Constant(0.3);

  void validate() const;
};

struct ControllerOptions {
  RotorBounds bounds;
  /// Component-wise anti-windup bound on the position integrator, m*s.
  double integrator_limit = 2.0;
  /// Desired-force magnitude below which no attitude can be constructed.
  double thrust_epsilon = 1e-6;
};

/// Desired flat output (x, y, z, yaw) and its first two time derivatives.
struct ReferencePoint {
  Vec4 position = Vec4::Zero();
  Vec4 velocity = Vec4::Zero();
  Vec4 acceleration = Vec4::Zero();
};

struct ControlOutput {
  RotorInput u = RotorInput::Zero();      ///< clamped to the rotor bounds
  RotorInput u_raw = RotorInput::Zero();  ///< S^-1 [f, tau] before clamping
  Vec3 xi_dot = Vec3::Zero();
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();
  bool saturated = false;
};

/// Extracts (x, y, z) from a skew-symmetric matrix.
Vec3 vee(const Mat3& S);

/// e_q = 1/2 (R_d^T R(q) - R(q)^T R_d)^vee.
Vec3 attitude_error(const Mat3& R_d, const Vec4& q);

/// Rotation whose third column is along f_vec and whose heading follows yaw.
Mat3 desired_attitude(const Vec3& f_vec, double yaw, double thrust_epsilon = 1e-6);

/// Geometric tracking law with position integrator.
///
/// f   = (-k_r e_r - k_v e_v - k_i xi + m (g z_W + r_d'')) . R(q) z_W
/// tau = -k_q e_q - k_w w
/// u   = S(p_c)^-1 [f, tau], clamped to the rotor bounds.
/// xi' = e_r, frozen per axis when |xi| reaches the integrator limit and the
/// error pushes further out.
///
/// With apply_limits = false neither the rotor clamp nor the anti-windup is
/// applied; sensitivity Jacobians use that smooth branch.
ControlOutput control(const Vec3& xi, const State13& x, const ReferencePoint& ref,
                      const ControllerGains& gains, const ParamVector& p_c,
                      const PhysicalConstants& c, const ControllerOptions& options,
                      bool apply_limits = true);

}  // namespace cop

#endif  // COP_CONTROLLER_HPP
