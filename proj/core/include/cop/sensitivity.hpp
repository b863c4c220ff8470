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

#ifndef COP_SENSITIVITY_HPP
#define COP_SENSITIVITY_HPP

#include <optional>

#include "cop/simulation.hpp"

namespace cop {

/// Partial derivatives of plant f, integrator g and control law c at one
/// closed-loop point. Dimensions: n_x = 13, n_u = 4, n_p = 2, n_xi = 3.
struct JacobianSet {
  Eigen::Matrix<double, 13, 13> f_x;
  Eigen::Matrix<double, 13, 4> f_u;
  Eigen::Matrix<double, 13, 2> f_p;
  Eigen::Matrix<double, 3, 13> g_x;
  Eigen::Matrix<double, 3, 3> g_xi;
  Eigen::Matrix<double, 4, 13> c_x;
  Eigen::Matrix<double, 4, 3> c_xi;

  bool all_finite() const;
};

/// Central finite differences with step h = max(1e-6, 1e-6 |v|) per
/// variable. Quaternion components are perturbed and then renormalized.
/// The controller is differentiated without clamping or anti-windup.
/// Throws NumericalError on any non-finite entry.
JacobianSet jacobians(const State13& x, const Vec3& xi, const ReferencePoint& ref,
                      const ClosedLoopModel& model);

enum class MatrixNorm { kFrobenius, kSpectral };

struct SensitivityOptions {
  /// Keep the forcing term f_p. Disabling it leaves the homogeneous system.
  bool parameter_forcing = true;
  std::optional<Eigen::Matrix<double, 13, 2>> initial_pi;
  std::optional<Eigen::Matrix<double, 3, 2>> initial_pi_xi;
};

/// Integrates the closed loop at p = p_c jointly with
///   Pi'    = f_x Pi + f_u Theta + f_p,       Pi(0) = 0
///   Pi_xi' = g_x Pi + g_xi Pi_xi,            Pi_xi(0) = 0
///   Theta  = c_x Pi + c_xi Pi_xi
/// and records the bundle on every output sample.
SimTrace propagate(const State13& x0, const Vec3& xi0, const PiecewiseBezier& traj,
                   const ClosedLoopModel& model, double T, const IntegratorOptions& opts,
                   const SensitivityOptions& sens = {});

/// Which rows of Pi enter the state-sensitivity cost.
enum class PiRows { kPosition, kAll };

struct SensitivityCostOptions {
  MatrixNorm norm = MatrixNorm::kFrobenius;
  PiRows pi_rows = PiRows::kPosition;
};

double matrix_norm(const MatX& m, MatrixNorm norm);

/// integral_0^T ||M_sel Pi(t)|| dt over the recorded bundles.
double cost_pi(const SimTrace& trace, const SensitivityCostOptions& options = {});
/// integral_0^T ||Theta(t)|| dt over the recorded bundles.
double cost_theta(const SimTrace& trace, const SensitivityCostOptions& options = {});

}  // namespace cop

#endif  // COP_SENSITIVITY_HPP
