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

#include "cop/campaign.hpp"
#include "cop/errors.hpp"
#include "test_support.hpp"

namespace cop {
namespace {

TEST(Rng, DerivedStreamsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  // splitmix64 reference value for state 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, UniformMomentsAndRange) {
  Rng rng = make_rng(7, 1);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform(rng, -2.0, 3.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 3.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 0.02);
  EXPECT_NEAR(sq / n - mean * mean, 25.0 / 12.0, 0.03);
}

TEST(Rng, NormalMoments) {
  Rng rng = make_rng(8, 1);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Perturb, LawsStayWithinAmplitude) {
  const ParamVector p0;
  for (PerturbationLaw law : {PerturbationLaw::kUniform, PerturbationLaw::kNormalClipped}) {
    Rng rng = make_rng(3, 4);
    for (int i = 0; i < 5000; ++i) {
      const ParamVector p = perturb(p0, 0.05, law, rng);
      EXPECT_LE(std::abs(p.kf / p0.kf - 1.0), 0.05 + 1e-15);
      EXPECT_LE(std::abs(p.km / p0.km - 1.0), 0.05 + 1e-15);
    }
  }
  Rng rng = make_rng(3, 4);
  const ParamVector same = perturb(p0, 0.0, PerturbationLaw::kUniform, rng);
  EXPECT_EQ(same.kf, p0.kf);
  EXPECT_EQ(same.km, p0.km);
  EXPECT_THROW(perturb(p0, 1.0, PerturbationLaw::kUniform, rng), DomainError);
  EXPECT_THROW(perturb(p0, -0.1, PerturbationLaw::kUniform, rng), DomainError);
}

TEST(Perturb, LawNames) {
  for (PerturbationLaw law : {PerturbationLaw::kUniform, PerturbationLaw::kNormalClipped}) {
    EXPECT_EQ(parse_perturbation_law(to_string(law)), law);
  }
  EXPECT_THROW(parse_perturbation_law("gamma"), DomainError);
}

TEST(Summary, QuartilesByLinearInterpolation) {
  const SummaryStats s = summarize({5, 1, 4, 2, 3});
  EXPECT_EQ(s.n, 5);
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.q1, 2);
  EXPECT_EQ(s.median, 3);
  EXPECT_EQ(s.q3, 4);
  EXPECT_EQ(s.max, 5);
  EXPECT_EQ(s.mean, 3);
  const SummaryStats e = summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(e.median, 2.5);
  EXPECT_DOUBLE_EQ(e.q1, 1.75);
  EXPECT_DOUBLE_EQ(e.q3, 3.25);
  EXPECT_THROW(summarize({}), DomainError);
}

TEST(Summary, PermutationInvariant) {
  std::mt19937_64 gen(1);
  std::vector<double> v(101);
  std::uniform_real_distribution<double> u;
  for (double& x : v) x = u(gen);
  const SummaryStats a = summarize(v);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(v.begin(), v.end(), gen);
    const SummaryStats b = summarize(v);
    EXPECT_EQ(a.q1, b.q1);
    EXPECT_EQ(a.median, b.median);
    EXPECT_EQ(a.q3, b.q3);
  }
}

CampaignEntry entry(int target, const std::string& traj, double median) {
  CampaignEntry e;
  e.target = target;
  e.trajectory = traj;
  e.amplitude = 0.01;
  e.stats.median = median;
  e.stats.n = 10;
  return e;
}

TEST(Compare, OrderingPerTarget) {
  const std::vector<CampaignEntry> entries = {
      entry(0, "sis", 1.0), entry(0, "cop", 2.0), entry(0, "e2log", 3.0), entry(0, "init", 9.0),
      entry(1, "sis", 2.0), entry(1, "cop", 1.0), entry(1, "e2log", 1.0)};
  const auto v = campaign_compare(entries);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_TRUE(v[0].sis_le_cop);
  EXPECT_TRUE(v[0].cop_le_e2log);
  EXPECT_FALSE(v[1].sis_le_cop);
  EXPECT_TRUE(v[1].cop_le_e2log);
  EXPECT_EQ(v[0].samples, 10);
}

TEST(Compare, MissingTrajectoryThrows) {
  EXPECT_THROW(campaign_compare({entry(0, "sis", 1.0), entry(0, "cop", 2.0)}), DomainError);
}

TEST(Compare, Tolerance) {
  EXPECT_TRUE(le_within(1.0, 1.0, 0.0));
  EXPECT_FALSE(le_within(1.0001, 1.0, 0.0));
  EXPECT_TRUE(le_within(1.005, 1.0));
  EXPECT_FALSE(le_within(1.02, 1.0));
  const auto strict = campaign_compare({entry(0, "sis", 1.005), entry(0, "cop", 1.0), entry(0, "e2log", 1.0)}, 0.0);
  EXPECT_FALSE(strict[0].sis_le_cop);
  const auto loose = campaign_compare({entry(0, "sis", 1.005), entry(0, "cop", 1.0), entry(0, "e2log", 1.0)});
  EXPECT_TRUE(loose[0].sis_le_cop);
}

TEST(Targets, DrawnInsideTheBoxAndSeeded) {
  CampaignOptions o;
  o.targets = 50;
  const auto a = draw_targets(o, 11);
  const auto b = draw_targets(o, 11);
  const auto c = draw_targets(o, 12);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE((a[i].array() >= o.target_min.array()).all());
    EXPECT_TRUE((a[i].array() <= o.target_max.array()).all());
    EXPECT_EQ(a[i], b[i]);
  }
  EXPECT_NE(a[0], c[0]);
}

TEST(CampaignOptions, Validation) {
  CampaignOptions o;
  EXPECT_NO_THROW(o.validate());
  o.amplitudes = {};
  EXPECT_THROW(o.validate(), DomainError);
  o = CampaignOptions{};
  o.flights = 0;
  EXPECT_THROW(o.validate(), DomainError);
}

class Flights : public ::testing::Test {
 protected:
  Flights() : config_(testing::short_config(3.0)), mission_(config_.mission, config_.evaluation) {
    a_ = mission_.layout().straight_line();
  }
  RunConfig config_;
  Mission mission_;
  VecX a_;
};

TEST_F(Flights, ZeroAmplitudeGivesIdenticalFlights) {
  const FlightSamples s = monte_carlo_tracking(mission_, a_, 0.0, 4, 1);
  ASSERT_EQ(s.errors.size(), 4u);
  for (double e : s.errors) EXPECT_EQ(e, s.errors.front());
  EXPECT_EQ(s.errors.front(), mission_.evaluate(a_, ObjectiveMask::none()).tracking_error);
}

TEST_F(Flights, LargerPerturbationRaisesTheMedian) {
  const SummaryStats small = summarize(monte_carlo_tracking(mission_, a_, 0.01, 10, 2).errors);
  const SummaryStats large = summarize(monte_carlo_tracking(mission_, a_, 0.05, 10, 2).errors);
  EXPECT_GE(large.median, small.median);
}

TEST_F(Flights, WorkerCountDoesNotChangeResults) {
  const FlightSamples one = monte_carlo_tracking(mission_, a_, 0.02, 8, 3, PerturbationLaw::kUniform, 1);
  const FlightSamples four = monte_carlo_tracking(mission_, a_, 0.02, 8, 3, PerturbationLaw::kUniform, 4);
  EXPECT_EQ(one.errors, four.errors);
  for (std::size_t i = 0; i < one.params.size(); ++i) {
    EXPECT_EQ(one.params[i].kf, four.params[i].kf);
  }
}

TEST_F(Flights, SameDrawsForEveryTrajectory) {
  VecX other = a_;
  other.head(3) += Vec3(0.2, -0.1, 0.1);
  const FlightSamples s1 = monte_carlo_tracking(mission_, a_, 0.02, 5, 4);
  const FlightSamples s2 = monte_carlo_tracking(mission_, other, 0.02, 5, 4);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s1.params[i].kf, s2.params[i].kf);
    EXPECT_EQ(s1.params[i].km, s2.params[i].km);
  }
}

}  // namespace
}  // namespace cop
