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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cop/errors.hpp"
#include "cop/scalarization.hpp"

namespace cop {
namespace {

ParetoAnchors anchors2(double o1, double o2, double n1, double n2) {
  ParetoAnchors a;
  a.utopia = Eigen::Vector2d(o1, o2);
  a.nadir = Eigen::Vector2d(n1, n2);
  return a;
}

TEST(Anchors, TwoByTwoExample) {
  MatX m(2, 2);
  m << 1, 9, 3, 2;
  const ParetoAnchors a = compute_anchors(m);
  EXPECT_EQ(a.utopia, Eigen::Vector2d(1, 2));
  EXPECT_EQ(a.nadir, Eigen::Vector2d(3, 9));
  EXPECT_FALSE(a.any_degenerate());
}

TEST(Anchors, SingleObjectiveIsReturnedAsIs) {
  const ParetoAnchors a = compute_anchors(MatX::Constant(1, 1, 4.0));
  EXPECT_EQ(a.utopia(0), 4.0);
  EXPECT_EQ(a.nadir(0), 4.0);
  EXPECT_TRUE(a.degenerate(0));
}

TEST(Anchors, IdenticalRowsAreDegenerate) {
  MatX m(3, 3);
  m << 1, 2, 3, 1, 2, 3, 1, 2, 3;
  EXPECT_THROW(compute_anchors(m), DegenerateRangeError);
  const ParetoAnchors a = compute_anchors_unchecked(m);
  EXPECT_TRUE(a.degenerate(0));
  EXPECT_TRUE(a.degenerate(2));
}

TEST(Anchors, NadirDominatesUtopia) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    MatX m(3, 3);
    m = m.unaryExpr([&](double) { return u(gen); });
    const ParetoAnchors a = compute_anchors_unchecked(m);
    EXPECT_TRUE((a.nadir.array() >= a.utopia.array()).all());
  }
}

TEST(Anchors, RejectsNonSquare) { EXPECT_THROW(compute_anchors(MatX::Zero(2, 3)), DomainError); }

TEST(Tchebycheff, WorkedExample) {
  const ParetoAnchors a = anchors2(0, 0, 2, 4);
  EXPECT_NEAR(tchebycheff(Eigen::Vector2d(1, 2), a, Eigen::Vector2d(0.5, 0.5), 1e-4), 0.2503, 1e-12);
}

TEST(Tchebycheff, UtopiaGivesZero) {
  const ParetoAnchors a = anchors2(1, -3, 2, 4);
  EXPECT_EQ(tchebycheff(a.utopia, a, Eigen::Vector2d(0.3, 0.7), 1e-2), 0.0);
}

TEST(Tchebycheff, SingleObjectiveReduction) {
  const ParetoAnchors a = anchors2(1, -3, 5, 4);
  const double U = tchebycheff(Eigen::Vector2d(2, 100), a, Eigen::Vector2d(1, 0), 0.0);
  EXPECT_NEAR(U, 1.0 / 4.0, 1e-15);
}

TEST(Tchebycheff, NormalizationAtNadir) {
  ParetoAnchors a;
  a.utopia = Eigen::Vector3d(0.5, -1, 2);
  a.nadir = Eigen::Vector3d(3, 4, 2.5);
  const VecX w = Eigen::Vector3d(0.2, 0.5, 0.3);
  EXPECT_NEAR(tchebycheff(a.nadir, a, w, 0.0), 0.5, 1e-15);
}

TEST(Tchebycheff, NonFiniteObjectiveIsInfinite) {
  const ParetoAnchors a = anchors2(0, 0, 1, 1);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(tchebycheff(Eigen::Vector2d(inf, 0), a, Eigen::Vector2d(0.5, 0.5), 1e-4), inf);
  EXPECT_EQ(tchebycheff(Eigen::Vector2d(std::nan(""), 0), a, Eigen::Vector2d(0.5, 0.5), 1e-4), inf);
}

TEST(Tchebycheff, DegenerateAnchorWithPositiveWeightThrows) {
  const ParetoAnchors a = anchors2(0, 1, 1, 1);
  EXPECT_THROW(tchebycheff(Eigen::Vector2d(0.5, 1), a, Eigen::Vector2d(0.5, 0.5), 0.0),
               DegenerateRangeError);
  EXPECT_NO_THROW(tchebycheff(Eigen::Vector2d(0.5, 1), a, Eigen::Vector2d(1, 0), 0.0));
}

TEST(Tchebycheff, RejectsBadInputs) {
  const ParetoAnchors a = anchors2(0, 0, 1, 1);
  const VecX F = Eigen::Vector2d(0.5, 0.5);
  EXPECT_THROW(tchebycheff(F, a, Eigen::Vector2d(0.7, 0.7), 0.0), DomainError);
  EXPECT_THROW(tchebycheff(F, a, Eigen::Vector2d(1.5, -0.5), 0.0), DomainError);
  EXPECT_THROW(tchebycheff(F, a, Eigen::Vector2d(0.5, 0.5), -1e-3), DomainError);
  EXPECT_THROW(tchebycheff(Eigen::Vector3d(0, 0, 0), a, Eigen::Vector2d(0.5, 0.5), 0.0), DomainError);
}

class TchebycheffProperties : public ::testing::Test {
 protected:
  std::mt19937_64 gen{42};
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  ParetoAnchors random_anchors() {
    ParetoAnchors a;
    a.utopia = VecX(3);
    a.nadir = VecX(3);
    for (int i = 0; i < 3; ++i) {
      a.utopia(i) = 10 * unit(gen) - 5;
      a.nadir(i) = a.utopia(i) + 0.1 + 5 * unit(gen);
    }
    return a;
  }
  VecX random_weights() {
    VecX w(3);
    for (int i = 0; i < 3; ++i) w(i) = unit(gen) + 1e-3;
    return w / w.sum();
  }
  VecX random_point(const ParetoAnchors& a) {
    VecX F(3);
    for (int i = 0; i < 3; ++i) F(i) = a.utopia(i) + (unit(gen) - 0.3) * 2 * (a.nadir(i) - a.utopia(i));
    return F;
  }
};

TEST_F(TchebycheffProperties, NonNegativeAndZeroOnlyAtUtopia) {
  for (int trial = 0; trial < 10000; ++trial) {
    const ParetoAnchors a = random_anchors();
    const VecX F = random_point(a);
    const double U = tchebycheff(F, a, random_weights(), 1e-4);
    EXPECT_GE(U, 0.0);
    if (F != a.utopia) EXPECT_GT(U, 0.0);
  }
}

TEST_F(TchebycheffProperties, Monotone) {
  for (int trial = 0; trial < 10000; ++trial) {
    const ParetoAnchors a = random_anchors();
    const VecX w = random_weights();
    const VecX F = random_point(a);
    const int i = trial % 3;
    VecX G = F;
    const double dir = F(i) >= a.utopia(i) ? 1.0 : -1.0;
    G(i) += dir * (0.01 + unit(gen));
    EXPECT_GE(tchebycheff(G, a, w, 0.0), tchebycheff(F, a, w, 0.0));
    EXPECT_GT(tchebycheff(G, a, w, 1e-4), tchebycheff(F, a, w, 1e-4));
  }
}

TEST_F(TchebycheffProperties, PermutationSymmetric) {
  for (int trial = 0; trial < 1000; ++trial) {
    const ParetoAnchors a = random_anchors();
    const VecX w = random_weights();
    const VecX F = random_point(a);
    Eigen::PermutationMatrix<3> P;
    P.setIdentity();
    std::shuffle(P.indices().data(), P.indices().data() + 3, gen);
    ParetoAnchors b;
    b.utopia = P * a.utopia;
    b.nadir = P * a.nadir;
    const VecX wp = P * w;
    EXPECT_NEAR(tchebycheff(P * F, b, wp / wp.sum(), 1e-3), tchebycheff(F, a, w, 1e-3), 1e-12);
  }
}

TEST_F(TchebycheffProperties, DominatesLinearScalarizationTerm) {
  // max_i w_i x_i >= sum_i w_i x_i / k for non-negative normalized gaps.
  for (int trial = 0; trial < 1000; ++trial) {
    const ParetoAnchors a = random_anchors();
    const VecX w = random_weights();
    VecX F(3);
    for (int i = 0; i < 3; ++i) F(i) = a.utopia(i) + unit(gen) * (a.nadir(i) - a.utopia(i));
    EXPECT_GE(tchebycheff(F, a, w, 0.0) + 1e-15, linear_scalarization(F, a, w) / 3.0);
  }
}

}  // namespace
}  // namespace cop
