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

#include "cop/observability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cop/errors.hpp"

namespace cop {

MatX taylor_jacobian(const std::vector<MatX>& gradients, double dt, int n) {
  if (n < 0 || n >= static_cast<int>(gradients.size())) {
    throw DomainError("Taylor order exceeds the available Lie gradients");
  }
  MatX K = gradients[0];
  double coeff = 1.0;
  for (int i = 1; i <= n; ++i) {
    coeff *= dt / static_cast<double>(i);
    K += coeff * gradients[i];
  }
  return K;
}

int MeasurementModel::output_dim() const {
  return (position ? 3 : 0) + (orientation ? 4 : 0) + (body_rate ? 3 : 0) +
         (accelerometer ? 3 : 0);
}

void MeasurementModel::validate() const {
  if (output_dim() < 1) throw DomainError("measurement model needs at least one channel");
}

Vec4 MeasurementModel::model_input(const RotorInput& u) const {
  if (!rotor_speed_inputs) return u;
  return u.cwiseMax(0.0).cwiseSqrt();
}

VecX MeasurementModel::augmented_state(const State13& x, const ParamVector& p) const {
  VecX out(state_dim());
  out.head<state_index::kSize>() = x;
  if (augment_parameters) {
    out(state_index::kSize) = p.kf;
    out(state_index::kSize + 1) = p.km;
  }
  return out;
}

GramianAccumulator::GramianAccumulator(int n, VecX scaling)
    : W_(MatX::Zero(n, n)), scaling_(std::move(scaling)) {
  if (scaling_.size() == 0) scaling_ = VecX::Ones(n);
  if (scaling_.size() != n) throw DomainError("scaling vector length must match the state size");
}

void GramianAccumulator::add(const MatX& segment) {
  if (segment.rows() != W_.rows() || segment.cols() != W_.cols()) {
    throw DomainError("segment Gramian has the wrong shape");
  }
  W_ += segment;
  ++segments_;
}

double GramianAccumulator::lambda_min() const { return smallest_eigenvalue(W_); }

double GramianAccumulator::lambda_max() const { return eigenvalues().maxCoeff(); }

VecX GramianAccumulator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<MatX> es(W_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void GramianOptions::validate() const {
  if (taylor_order < 0 || taylor_order > kMaxLieOrder) throw DomainError("unsupported Taylor order");
  if (segments < 1) throw DomainError("at least one Gramian segment is required");
  if (quadrature_nodes < 3 || quadrature_nodes % 2 == 0) {
    throw DomainError("Simpson quadrature needs an odd node count >= 3");
  }
  if (scaling.size() > 0 && !(scaling.array() > 0.0).all()) {
    throw DomainError("scaling entries must be positive");
  }
}

MatX segment_gramian(const std::vector<MatX>& gradients, double horizon, int order,
                     const VecX& scaling, int quadrature_nodes) {
  if (gradients.empty()) throw DomainError("no Lie gradients supplied");
  if (quadrature_nodes < 3 || quadrature_nodes % 2 == 0) {
    throw DomainError("Simpson quadrature needs an odd node count >= 3");
  }
  const Eigen::Index n = gradients.front().cols();
  const VecX inv_scale = scaling.size() == 0 ? VecX::Ones(n) : VecX(scaling.cwiseInverse());
  if (inv_scale.size() != n) throw DomainError("scaling vector length must match the state size");

  const int intervals = quadrature_nodes - 1;
  const double h = horizon / intervals;
  MatX W = MatX::Zero(n, n);
  for (int k = 0; k <= intervals; ++k) {
    const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const MatX K = taylor_jacobian(gradients, k * h, order) * inv_scale.asDiagonal();
    W.noalias() += weight * (K.transpose() * K);
  }
  return W * (h / 3.0);
}

LieStack quadrotor_lie_stack(const MeasurementModel& model, const VecX& x_aug, const Vec4& u_model,
                             const PhysicalConstants& c, const ParamVector& nominal, int order) {
  auto f = [&](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return model.field<S>(x, u_model.cast<S>(), c, nominal);
  };
  auto h = [&](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return model.measure<S>(x, u_model.cast<S>(), c, nominal);
  };
  return lie_stack(f, h, x_aug, order);
}

std::pair<State13, RotorInput> trace_anchor(const SimTrace& trace, double t) {
  if (trace.times.empty()) throw DomainError("empty trace");
  const double slack = 1e-9 * std::max(1.0, std::abs(trace.times.back()));
  if (t < trace.times.front() - slack || t > trace.times.back() + slack) {
    throw DomainError("anchor time outside the trace");
  }
  const auto it = std::lower_bound(trace.times.begin(), trace.times.end(), t - slack);
  auto k = static_cast<std::size_t>(it - trace.times.begin());
  if (k >= trace.times.size()) k = trace.times.size() - 1;
  if (std::abs(trace.times[k] - t) <= slack || k == 0) {
    return {trace.states[k], trace.inputs[k]};
  }
  const double t0 = trace.times[k - 1];
  const double s = (t - t0) / (trace.times[k] - t0);
  State13 x = (1.0 - s) * trace.states[k - 1] + s * trace.states[k];
  normalize_quaternion(x);
  const RotorInput u = (1.0 - s) * trace.inputs[k - 1] + s * trace.inputs[k];
  return {x, u};
}

MatX segment_gramian(const SimTrace& trace, double t0, double horizon,
                     const MeasurementModel& model, const PhysicalConstants& c,
                     const ParamVector& nominal, const GramianOptions& options) {
  const auto [x, u] = trace_anchor(trace, t0);
  const LieStack stack = quadrotor_lie_stack(model, model.augmented_state(x, nominal),
                                             model.model_input(u), c, nominal,
                                             options.taylor_order);
  return segment_gramian(stack.gradients, horizon, options.taylor_order, options.scaling,
                         options.quadrature_nodes);
}

GramianAccumulator e2log(const SimTrace& trace, const MeasurementModel& model,
                         const PhysicalConstants& c, const ParamVector& nominal,
                         const GramianOptions& options) {
  options.validate();
  model.validate();
  trace.require_ok();
  GramianAccumulator acc(model.state_dim(), options.scaling);
  const double T = trace.duration();
  const double dt = T / options.segments;
  for (int k = 0; k < options.segments; ++k) {
    acc.add(segment_gramian(trace, trace.times.front() + k * dt, dt, model, c, nominal, options));
  }
  return acc;
}

double smallest_eigenvalue(const MatX& W) {
  Eigen::SelfAdjointEigenSolver<MatX> es(W, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigen decomposition failed");
  return es.eigenvalues().minCoeff();
}

double cost_e2log(const MatX& W) { return -smallest_eigenvalue(W); }

}  // namespace cop
