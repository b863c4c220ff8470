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

#include "cop/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "cop/errors.hpp"

namespace cop {

namespace {

constexpr int kNx = state_index::kSize;
constexpr int kNu = 4;
constexpr int kNp = 2;
constexpr int kNxi = 3;

double fd_step(double v) { return std::max(1e-6, 1e-6 * std::abs(v)); }

State13 perturbed_state(const State13& x, int i, double delta) {
  State13 out = x;
  out(i) += delta;
  if (i >= state_index::kQuaternion && i < state_index::kQuaternion + 4) normalize_quaternion(out);
  return out;
}

}  // namespace

bool JacobianSet::all_finite() const {
  return f_x.allFinite() && f_u.allFinite() && f_p.allFinite() && g_x.allFinite() &&
         g_xi.allFinite() && c_x.allFinite() && c_xi.allFinite();
}

JacobianSet jacobians(const State13& x, const Vec3& xi, const ReferencePoint& ref,
                      const ClosedLoopModel& model) {
  const auto& c = model.constants;
  const auto& p_c = model.nominal;
  auto law = [&](const Vec3& xi_v, const State13& x_v) {
    return control(xi_v, x_v, ref, model.gains, p_c, c, model.controller, false);
  };
  const RotorInput u = law(xi, x).u_raw;

  JacobianSet J;
  for (int i = 0; i < kNx; ++i) {
    const double h = fd_step(x(i));
    const State13 xp = perturbed_state(x, i, h);
    const State13 xm = perturbed_state(x, i, -h);
    J.f_x.col(i) = (dynamics(xp, u, p_c, c) - dynamics(xm, u, p_c, c)) / (2.0 * h);
    const auto op = law(xi, xp);
    const auto om = law(xi, xm);
    J.c_x.col(i) = (op.u_raw - om.u_raw) / (2.0 * h);
    J.g_x.col(i) = (op.xi_dot - om.xi_dot) / (2.0 * h);
  }
  for (int i = 0; i < kNu; ++i) {
    const double h = fd_step(u(i));
    RotorInput up = u, um = u;
    up(i) += h;
    um(i) -= h;
    J.f_u.col(i) = (dynamics(x, up, p_c, c) - dynamics(x, um, p_c, c)) / (2.0 * h);
  }
  const Eigen::Vector2d p = p_c.as_vector();
  for (int i = 0; i < kNp; ++i) {
    const double h = fd_step(p(i));
    Eigen::Vector2d pp = p, pm = p;
    pp(i) += h;
    pm(i) -= h;
    J.f_p.col(i) = (dynamics(x, u, ParamVector::from_vector(pp), c) -
                    dynamics(x, u, ParamVector::from_vector(pm), c)) /
                   (2.0 * h);
  }
  for (int i = 0; i < kNxi; ++i) {
    const double h = fd_step(xi(i));
    Vec3 xp = xi, xm = xi;
    xp(i) += h;
    xm(i) -= h;
    const auto op = law(xp, x);
    const auto om = law(xm, x);
    J.c_xi.col(i) = (op.u_raw - om.u_raw) / (2.0 * h);
    J.g_xi.col(i) = (op.xi_dot - om.xi_dot) / (2.0 * h);
  }
  if (!J.all_finite()) throw NumericalError("non-finite entry in closed-loop Jacobians");
  return J;
}

SimTrace propagate(const State13& x0, const Vec3& xi0, const PiecewiseBezier& traj,
                   const ClosedLoopModel& model, double T, const IntegratorOptions& opts,
                   const SensitivityOptions& sens) {
  if (!(T > 0.0)) throw DomainError("simulation horizon must be positive");
  if (traj.start_time() > 0.0 || traj.end_time() < T - 1e-9) {
    throw DomainError("trajectory does not span the simulation horizon");
  }
  // y = [x (13), xi (3), vec(Pi) (26), vec(Pi_xi) (6)], column-major blocks.
  constexpr int kPiOffset = kNx + kNxi;
  constexpr int kPiXiOffset = kPiOffset + kNx * kNp;
  constexpr int kSize = kPiXiOffset + kNxi * kNp;
  using PiMat = Eigen::Matrix<double, kNx, kNp>;
  using PiXiMat = Eigen::Matrix<double, kNxi, kNp>;

  const auto& p_c = model.nominal;
  auto rhs = [&](const OdeState& y, OdeState& dy, double t) {
    const State13 x = Eigen::Map<const State13>(y.data());
    const Vec3 xi = Eigen::Map<const Vec3>(y.data() + kNx);
    const Eigen::Map<const PiMat> Pi(y.data() + kPiOffset);
    const Eigen::Map<const PiXiMat> PiXi(y.data() + kPiXiOffset);
    const ReferencePoint ref = traj.reference(t);
    const auto out = control(xi, x, ref, model.gains, p_c, model.constants, model.controller);
    const JacobianSet J = jacobians(x, xi, ref, model);
    const Eigen::Matrix<double, kNu, kNp> Theta = J.c_x * Pi + J.c_xi * PiXi;

    dy.resize(kSize);
    Eigen::Map<State13>(dy.data()) = dynamics(x, out.u, p_c, model.constants);
    Eigen::Map<Vec3>(dy.data() + kNx) = out.xi_dot;
    PiMat dPi = J.f_x * Pi + J.f_u * Theta;
    if (sens.parameter_forcing) dPi += J.f_p;
    Eigen::Map<PiMat>(dy.data() + kPiOffset) = dPi;
    Eigen::Map<PiXiMat>(dy.data() + kPiXiOffset) = J.g_x * Pi + J.g_xi * PiXi;
  };
  auto project = [](OdeState& y) {
    Eigen::Map<Vec4> q(y.data() + state_index::kQuaternion);
    q.normalize();
  };

  SimTrace trace;
  auto sample = [&](double t, const OdeState& y) {
    const State13 x = Eigen::Map<const State13>(y.data());
    const Vec3 xi = Eigen::Map<const Vec3>(y.data() + kNx);
    const ReferencePoint ref = traj.reference(t);
    const auto out = control(xi, x, ref, model.gains, p_c, model.constants, model.controller);
    SensitivityBundle bundle;
    bundle.pi = Eigen::Map<const PiMat>(y.data() + kPiOffset);
    bundle.pi_xi = Eigen::Map<const PiXiMat>(y.data() + kPiXiOffset);
    const JacobianSet J = jacobians(x, xi, ref, model);
    bundle.theta = J.c_x * bundle.pi + J.c_xi * bundle.pi_xi;

    trace.times.push_back(t);
    trace.states.push_back(x);
    trace.controller_states.push_back(xi);
    trace.inputs.push_back(out.u);
    trace.commands.push_back(out.u_raw);
    trace.sensitivities.push_back(bundle);
    if (out.saturated) ++trace.saturation_samples;
  };

  OdeState y(kSize, 0.0);
  State13 x_init = x0;
  normalize_quaternion(x_init);
  Eigen::Map<State13>(y.data()) = x_init;
  Eigen::Map<Vec3>(y.data() + kNx) = xi0;
  if (sens.initial_pi) Eigen::Map<PiMat>(y.data() + kPiOffset) = *sens.initial_pi;
  if (sens.initial_pi_xi) Eigen::Map<PiXiMat>(y.data() + kPiXiOffset) = *sens.initial_pi_xi;

  IntegrationStatus status;
  try {
    status = integrate_sampled(y, rhs, project, 0.0, T, opts, sample, kPiOffset);
  } catch (const DegenerateThrustError& e) {
    status.diverged = true;
    status.reason = e.what();
  } catch (const NumericalError& e) {
    status.diverged = true;
    status.reason = e.what();
  }
  if (status.diverged && status.last_valid_time == 0.0 && !trace.times.empty()) {
    status.last_valid_time = trace.times.back();
  }
  trace.diverged = status.diverged;
  trace.last_valid_time = status.last_valid_time;
  trace.failure = status.reason;
  return trace;
}

double matrix_norm(const MatX& m, MatrixNorm norm) {
  if (norm == MatrixNorm::kFrobenius) return m.norm();
  Eigen::JacobiSVD<MatX> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double cost_pi(const SimTrace& trace, const SensitivityCostOptions& options) {
  if (trace.sensitivities.size() != trace.times.size()) {
    throw DomainError("trace carries no sensitivity bundle");
  }
  std::vector<double> values(trace.times.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& pi = trace.sensitivities[k].pi;
    values[k] = options.pi_rows == PiRows::kPosition ? matrix_norm(pi.topRows<3>(), options.norm)
                                                     : matrix_norm(pi, options.norm);
  }
  return trapezoid(trace.times, values);
}

double cost_theta(const SimTrace& trace, const SensitivityCostOptions& options) {
  if (trace.sensitivities.size() != trace.times.size()) {
    throw DomainError("trace carries no sensitivity bundle");
  }
  std::vector<double> values(trace.times.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = matrix_norm(trace.sensitivities[k].theta, options.norm);
  }
  return trapezoid(trace.times, values);
}

}  // namespace cop
