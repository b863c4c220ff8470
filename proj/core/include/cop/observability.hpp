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

#ifndef COP_OBSERVABILITY_HPP
#define COP_OBSERVABILITY_HPP

#include <vector>

#include "cop/lie.hpp"
#include "cop/quadrotor.hpp"
#include "cop/simulation.hpp"

namespace cop {

/// Quadrotor measurement model over the (optionally parameter-augmented)
/// state x_aug = [r, v, q, w, k_f, k_m].
struct MeasurementModel {
  bool position = true;
  bool orientation = true;
  bool body_rate = true;
  bool accelerometer = false;
  /// Append k_f, k_m to the state with zero dynamics.
  bool augment_parameters = true;
  /// Inputs are rotor speeds u* = sqrt(u) instead of squared speeds.
  bool rotor_speed_inputs = true;

  int output_dim() const;
  int state_dim() const { return augment_parameters ? state_index::kSize + 2 : state_index::kSize; }
  void validate() const;

  /// h(x_aug, u).
  template <typename T>
  VecXT<T> measure(const VecXT<T>& x, const Vec4T<T>& u, const PhysicalConstants& c,
                   const ParamVector& nominal) const;

  /// Augmented vector field f_aug(x_aug, u).
  template <typename T>
  VecXT<T> field(const VecXT<T>& x, const Vec4T<T>& u, const PhysicalConstants& c,
                 const ParamVector& nominal) const;

  /// Maps an applied squared-rotor-speed command to this model's inputs.
  Vec4 model_input(const RotorInput& u) const;
  /// Builds x_aug from a plant state and the parameters to append.
  VecX augmented_state(const State13& x, const ParamVector& p) const;
};

/// Running E2LOG sum with its column scaling.
class GramianAccumulator {
 public:
  GramianAccumulator() = default;
  GramianAccumulator(int n, VecX scaling);

  void add(const MatX& segment);
  const MatX& matrix() const { return W_; }
  int segment_count() const { return segments_; }
  const VecX& scaling() const { return scaling_; }
  double lambda_min() const;
  double lambda_max() const;
  VecX eigenvalues() const;

 private:
  MatX W_;
  VecX scaling_;
  int segments_ = 0;
};

struct GramianOptions {
  int taylor_order = 2;
  int segments = 40;
  int quadrature_nodes = 5;  ///< composite Simpson nodes per segment (odd, >= 3)
  VecX scaling;              ///< per augmented state; empty means all ones

  void validate() const;
};

/// integral_0^H K'(t)^T K'(t) dt with K'(t) = K(t) diag(s)^-1 and K from the
/// Taylor expansion of the anchor gradients.
MatX segment_gramian(const std::vector<MatX>& gradients, double horizon, int order,
                     const VecX& scaling, int quadrature_nodes);

/// Lie stack of the measurement model at one closed-loop anchor.
LieStack quadrotor_lie_stack(const MeasurementModel& model, const VecX& x_aug, const Vec4& u_model,
                             const PhysicalConstants& c, const ParamVector& nominal, int order);

/// Plant state and applied input at time t, interpolated on the trace grid.
std::pair<State13, RotorInput> trace_anchor(const SimTrace& trace, double t);

/// Segment Gramian anchored on the trace at t0 over [t0, t0 + H].
MatX segment_gramian(const SimTrace& trace, double t0, double horizon,
                     const MeasurementModel& model, const PhysicalConstants& c,
                     const ParamVector& nominal, const GramianOptions& options);

/// Sum of N segment Gramians anchored at k T / N, k = 0..N-1.
GramianAccumulator e2log(const SimTrace& trace, const MeasurementModel& model,
                         const PhysicalConstants& c, const ParamVector& nominal,
                         const GramianOptions& options);

/// Smallest eigenvalue of a symmetric matrix (self-adjoint eigensolver).
double smallest_eigenvalue(const MatX& W);

/// -lambda_min(W).
double cost_e2log(const MatX& W);

// ---- template definitions ---------------------------------------------

template <typename T>
VecXT<T> MeasurementModel::measure(const VecXT<T>& x, const Vec4T<T>& u,
                                   const PhysicalConstants& c, const ParamVector& nominal) const {
  VecXT<T> y(output_dim());
  int row = 0;
  if (position) {
    y.template segment<3>(row) = x.template segment<3>(state_index::kPosition);
    row += 3;
  }
  if (orientation) {
    y.template segment<4>(row) = x.template segment<4>(state_index::kQuaternion);
    row += 4;
  }
  if (body_rate) {
    y.template segment<3>(row) = x.template segment<3>(state_index::kRate);
    row += 3;
  }
  if (accelerometer) {
    const T kf = augment_parameters ? x(state_index::kSize) : T(nominal.kf);
    const Vec4T<T> sq = rotor_speed_inputs ? Vec4T<T>(u.cwiseProduct(u)) : u;
    const T thrust = kf * (sq(0) + sq(1) + sq(2) + sq(3));
    y(row++) = T(0);
    y(row++) = T(0);
    y(row++) = thrust / T(c.mass);
  }
  return y;
}

template <typename T>
VecXT<T> MeasurementModel::field(const VecXT<T>& x, const Vec4T<T>& u, const PhysicalConstants& c,
                                 const ParamVector& nominal) const {
  const State13T<T> xs = x.template head<state_index::kSize>();
  const T kf = augment_parameters ? x(state_index::kSize) : T(nominal.kf);
  const T km = augment_parameters ? x(state_index::kSize + 1) : T(nominal.km);
  const Vec4T<T> sq = rotor_speed_inputs ? Vec4T<T>(u.cwiseProduct(u)) : u;
  VecXT<T> dx = VecXT<T>::Zero(state_dim());
  dx.template head<state_index::kSize>() = dynamics_t<T>(xs, sq, kf, km, c);
  return dx;
}

}  // namespace cop

#endif  // COP_OBSERVABILITY_HPP
