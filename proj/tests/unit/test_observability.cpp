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

#include <cmath>
#include <random>
#include <type_traits>

#include <gtest/gtest.h>

#include "cop/observability.hpp"
#include "test_support.hpp"

namespace cop {
namespace {

template <typename V>
using ScalarOf = typename std::decay_t<V>::Scalar;

TEST(LieStack, ConstantOutputHasZeroDerivatives) {
  const auto f = [](const auto& x) {
    using S = ScalarOf<decltype(x)>;
    VecXT<S> d(2);
    d << x(1), -x(0);
    return d;
  };
  const auto h = [](const auto& x) {
    using S = ScalarOf<decltype(x)>;
    VecXT<S> y(1);
    y(0) = S(2.0);
    return y;
  };
  const LieStack s = lie_stack(f, h, VecX::Constant(2, 0.3), 3);
  ASSERT_EQ(s.order(), 3);
  EXPECT_EQ(s.values[0](0), 2.0);
  for (int i = 0; i <= 3; ++i) {
    EXPECT_EQ(s.gradients[i].norm(), 0.0);
    if (i > 0) {
      EXPECT_EQ(s.values[i].norm(), 0.0);
    }
  }
}

TEST(LieStack, IdentityOutputAlongConstantField) {
  const Eigen::Vector3d c(1.0, -2.0, 0.5);
  const auto f = [&](const auto& x) {
    using S = ScalarOf<decltype(x)>;
    VecXT<S> d(3);
    for (int i = 0; i < 3; ++i) d(i) = S(c(i));
    return d;
  };
  const auto h = [](const auto& x) { return x; };
  const VecX x0 = Eigen::Vector3d(0.1, 0.2, 0.3);
  const LieStack s = lie_stack(f, h, x0, 2);
  EXPECT_EQ((s.values[0] - x0).norm(), 0.0);
  EXPECT_EQ((s.values[1] - VecX(c)).norm(), 0.0);
  EXPECT_EQ(s.values[2].norm(), 0.0);
  EXPECT_EQ((s.gradients[0] - MatX::Identity(3, 3)).norm(), 0.0);
  EXPECT_EQ(s.gradients[1].norm(), 0.0);
}

TEST(LieStack, LinearScalarSystem) {
  const double a = -0.7, x0 = 1.3;
  const auto f = [&](const auto& x) { return (x * a).eval(); };
  const auto h = [](const auto& x) { return x; };
  const LieStack s = lie_stack(f, h, VecX::Constant(1, x0), 4);
  for (int i = 0; i <= 4; ++i) {
    EXPECT_NEAR(s.values[i](0), std::pow(a, i) * x0, 1e-14);
    EXPECT_NEAR(s.gradients[i](0, 0), std::pow(a, i), 1e-14);
  }
}

TEST(LieStack, QuadraticScalarSystem) {
  // x' = x^2, h = x: L^1 = x^2, L^2 = 2x^3, L^3 = 6x^4, L^4 = 24x^5.
  const double x0 = 0.8;
  const auto f = [](const auto& x) { return x.cwiseProduct(x).eval(); };
  const auto h = [](const auto& x) { return x; };
  const LieStack s = lie_stack(f, h, VecX::Constant(1, x0), 4);
  double fact = 1.0;
  for (int i = 0; i <= 4; ++i) {
    if (i > 0) fact *= i;
    EXPECT_NEAR(s.values[i](0), fact * std::pow(x0, i + 1), 1e-12);
    EXPECT_NEAR(s.gradients[i](0, 0), fact * (i + 1) * std::pow(x0, i), 1e-12);
  }
}

TEST(LieStack, RejectsOrderOutOfRange) {
  const auto f = [](const auto& x) { return x; };
  EXPECT_THROW(lie_stack(f, f, VecX::Ones(1), kMaxLieOrder + 1), DomainError);
  EXPECT_THROW(lie_stack(f, f, VecX::Ones(1), -1), DomainError);
}

TEST(TaylorJacobian, DegenerateCases) {
  const std::vector<MatX> g = {MatX::Constant(2, 2, 1.0), MatX::Constant(2, 2, 3.0),
                               MatX::Constant(2, 2, 5.0)};
  EXPECT_EQ((taylor_jacobian(g, 0.0, 2) - g[0]).norm(), 0.0);
  EXPECT_EQ((taylor_jacobian(g, 0.7, 0) - g[0]).norm(), 0.0);
  const double dt = 0.4;
  EXPECT_NEAR(taylor_jacobian(g, dt, 2)(0, 0), 1.0 + 3.0 * dt + 5.0 * dt * dt / 2.0, 1e-15);
  EXPECT_THROW(taylor_jacobian(g, dt, 3), DomainError);
}

TEST(SegmentGramian, ConstantJacobian) {
  MatX K0(2, 3);
  K0 << 1, 2, 0, 0, 1, -1;
  const std::vector<MatX> g = {K0, MatX::Zero(2, 3), MatX::Zero(2, 3)};
  const double H = 0.25;
  const MatX W = segment_gramian(g, H, 2, VecX(), 5);
  EXPECT_LT((W - H * K0.transpose() * K0).norm(), 1e-14);

  const VecX s = Eigen::Vector3d(2.0, 0.5, 4.0);
  const MatX Ws = segment_gramian(g, H, 2, s, 5);
  const MatX D = s.cwiseInverse().asDiagonal();
  EXPECT_LT((Ws - H * D * K0.transpose() * K0 * D).norm(), 1e-13);
}

TEST(SegmentGramian, QuadraticIntegrandIsExact) {
  // K(t) = 1 + a t, so the integral of K^2 over [0, H] is H + a H^2 + a^2 H^3 / 3.
  const double a = 3.0, H = 0.5;
  const std::vector<MatX> g = {MatX::Ones(1, 1), MatX::Constant(1, 1, a)};
  const MatX W = segment_gramian(g, H, 1, VecX(), 3);
  EXPECT_NEAR(W(0, 0), H + a * H * H + a * a * H * H * H / 3.0, 1e-14);
}

TEST(SegmentGramian, ScalingCovariance) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n;
  std::vector<MatX> g(3, MatX(4, 5));
  for (auto& m : g) m = m.unaryExpr([&](double) { return n(gen); });
  const double c = 3.5;
  const MatX W1 = segment_gramian(g, 0.3, 2, VecX(), 7);
  const MatX Wc = segment_gramian(g, 0.3, 2, VecX::Constant(5, c), 7);
  EXPECT_LT((Wc - W1 / (c * c)).norm(), 1e-13 * W1.norm());
}

TEST(SegmentGramian, RejectsEvenNodeCount) {
  const std::vector<MatX> g = {MatX::Ones(1, 1)};
  EXPECT_THROW(segment_gramian(g, 1.0, 0, VecX(), 4), DomainError);
}

TEST(Accumulator, SymmetricPsdAndMonotone) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  GramianAccumulator acc(6, VecX());
  double previous = 0.0;
  for (int k = 0; k < 6; ++k) {
    std::vector<MatX> g(2, MatX(2, 6));
    for (auto& m : g) m = m.unaryExpr([&](double) { return n(gen); });
    acc.add(segment_gramian(g, 0.2, 1, VecX(), 5));
    const MatX& W = acc.matrix();
    EXPECT_LT((W - W.transpose()).norm(), 1e-14 * W.norm());
    const double lmin = acc.lambda_min();
    EXPECT_GE(lmin, -1e-12 * acc.lambda_max());
    EXPECT_GE(lmin, previous - 1e-12);
    previous = lmin;
  }
  EXPECT_EQ(acc.segment_count(), 6);
  EXPECT_GT(previous, 0.0);
}

TEST(CostE2log, Examples) {
  EXPECT_NEAR(cost_e2log(MatX::Identity(3, 3)), -1.0, 1e-14);
  MatX d = MatX::Zero(2, 2);
  d.diagonal() << 4.0, 9.0;
  EXPECT_NEAR(cost_e2log(d), -4.0, 1e-13);
}

TEST(CostE2log, MatchesPowerIteration) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n;
  MatX A(5, 5);
  A = A.unaryExpr([&](double) { return n(gen); });
  const MatX W = A.transpose() * A + 0.1 * MatX::Identity(5, 5);
  // Power iteration on sigma I - W converges to sigma - lambda_min.
  const double sigma = W.trace();
  const MatX B = sigma * MatX::Identity(5, 5) - W;
  VecX v = VecX::Ones(5);
  double mu = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const VecX w = B * v;
    mu = v.dot(w) / v.dot(v);
    v = w.normalized();
  }
  EXPECT_NEAR(-cost_e2log(W), sigma - mu, 1e-8);
}

TEST(E2log, ExcitedTrajectoryIsMoreObservableThanHover) {
  ClosedLoopModel model;
  IntegratorOptions io;
  io.method = IntegratorMethod::kRungeKutta4;
  io.step = 2e-3;
  const double T = 3.0;
  const PiecewiseBezier hover = testing::hover_trajectory(Vec3::Zero(), T);
  const PiecewiseBezier moving = testing::rest_to_rest(Vec3::Zero(), Vec3(1.5, -1.0, 0.5), T);
  const SimTrace a = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), hover, model.nominal, model, T, io);
  const SimTrace b = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), moving, model.nominal, model, T, io);
  MeasurementModel mm;
  GramianOptions go;
  go.segments = 10;
  const GramianAccumulator wa = e2log(a, mm, model.constants, model.nominal, go);
  const GramianAccumulator wb = e2log(b, mm, model.constants, model.nominal, go);
  EXPECT_EQ(wa.matrix().rows(), 15);
  EXPECT_EQ(wa.segment_count(), 10);
  EXPECT_GT(wb.lambda_min(), wa.lambda_min());
  EXPECT_GE(wa.lambda_min(), -1e-9 * wa.lambda_max());
}

TEST(E2log, TraceAnchorInterpolates) {
  ClosedLoopModel model;
  IntegratorOptions io;
  io.method = IntegratorMethod::kRungeKutta4;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(1, 0, 0), 1.0);
  const SimTrace tr = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 1.0, io);
  const auto [x0, u0] = trace_anchor(tr, tr.times[10]);
  EXPECT_EQ((x0 - tr.states[10]).norm(), 0.0);
  const auto [xm, um] = trace_anchor(tr, 0.5 * (tr.times[10] + tr.times[11]));
  EXPECT_LT((position(xm) - 0.5 * (position(tr.states[10]) + position(tr.states[11]))).norm(), 1e-12);
  EXPECT_NEAR(quaternion(xm).norm(), 1.0, 1e-12);
}

}  // namespace
}  // namespace cop
