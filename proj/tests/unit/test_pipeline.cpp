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

#include <gtest/gtest.h>

#include "cop/errors.hpp"
#include "cop/pipeline.hpp"
#include "test_support.hpp"

namespace cop {
namespace {

Mission make_mission(const RunConfig& c) { return Mission(c.mission, c.evaluation); }

TEST(PosteriorFilter, FourQuadrants) {
  EXPECT_TRUE(posterior_filter(0.5, -2.0, 1.0, -1.0));
  EXPECT_FALSE(posterior_filter(1.5, -2.0, 1.0, -1.0));
  EXPECT_FALSE(posterior_filter(0.5, -0.5, 1.0, -1.0));
  EXPECT_FALSE(posterior_filter(1.5, -0.5, 1.0, -1.0));
}

TEST(PosteriorFilter, EqualCostsAreRejected) {
  EXPECT_FALSE(posterior_filter(1.0, -1.0, 1.0, -1.0));
  EXPECT_FALSE(posterior_filter(0.5, -1.0, 1.0, -1.0));
  EXPECT_FALSE(posterior_filter(1.0, -2.0, 1.0, -1.0));
}

TEST(StageStatus, Names) {
  EXPECT_EQ(to_string(StageStatus::kOk), "ok");
  EXPECT_EQ(to_string(StageStatus::kSkipped), "skipped");
  EXPECT_EQ(to_string(StageStatus::kFailed), "failed");
  EXPECT_EQ(to_string(StageStatus::kNotRun), "not-run");
}

TEST(Precondition, NullMissionIsHover) {
  RunConfig c = testing::short_config();
  c.mission.target = c.mission.start;
  PreconditionOptions po;
  po.jitter_position = 0.0;
  po.jitter_yaw = 0.0;
  Mission m = make_mission(c);
  const PreconditionResult r = precondition(m, 1, po);
  EXPECT_LT((r.a_init - m.layout().straight_line()).norm(), 1e-12);
  EXPECT_FALSE(r.feasibility_ran);
  EXPECT_LT(r.tail_offset.norm(), 1e-2);
  EXPECT_LT(r.evaluation.terminal_error, 1e-2);
  EXPECT_LT(r.evaluation.tracking_error, 1e-3);
}

TEST(Precondition, ReachesTargetWithinTolerance) {
  RunConfig c = testing::short_config(5.0);
  c.mission.target = Vec3(3.0, 2.5, 0.8);
  Mission m = make_mission(c);
  const PreconditionResult r = precondition(m, 4, c.pipeline.precondition);
  EXPECT_TRUE(r.terminal_ok);
  EXPECT_LT(r.evaluation.terminal_error, 1e-2);
  EXPECT_GE(r.evaluation.rotor_margin, 0.0);
  EXPECT_EQ(r.evaluation.bound_violations, 0);
  EXPECT_TRUE(m.box().contains(r.a_init));
  EXPECT_EQ(m.tail_offset(), r.tail_offset);
}

TEST(Precondition, SeedChangesOnlyTheJitter) {
  RunConfig c = testing::short_config();
  Mission m1 = make_mission(c), m2 = make_mission(c), m3 = make_mission(c);
  PreconditionOptions po = c.pipeline.precondition;
  po.terminal.max_evaluations = 0;
  const VecX a1 = precondition(m1, 3, po).a_init;
  const VecX a2 = precondition(m2, 3, po).a_init;
  const VecX a3 = precondition(m3, 4, po).a_init;
  EXPECT_EQ(a1, a2);
  EXPECT_NE(a1, a3);
  EXPECT_LT((a1 - m1.layout().straight_line()).cwiseAbs().maxCoeff(), po.jitter_position + 1e-12);
}

TEST(Precondition, UnreachableBoundsThrow) {
  RunConfig c = testing::short_config(1.0);
  c.mission.target = Vec3(5, 5, 2.5);
  c.evaluation.model.controller.bounds.u_max = 5200.0;  // barely above hover
  PreconditionOptions po = c.pipeline.precondition;
  po.feasibility.max_evaluations = 20;
  Mission m = make_mission(c);
  EXPECT_THROW(precondition(m, 1, po), InfeasibleStartError);
}

TEST(RunStage, UnknownNameAndMissingAnchors) {
  const RunConfig c = testing::short_config();
  const Mission m = make_mission(c);
  const VecX a = m.layout().straight_line();
  EXPECT_THROW(run_stage(m, "bogus", a, OptimizerBudget{}), DomainError);
  EXPECT_THROW(run_stage(m, "cop", a, OptimizerBudget{}), DomainError);
}

TEST(RunStage, IndividualStageDoesNotIncreaseItsObjective) {
  const RunConfig c = testing::short_config();
  Mission m = make_mission(c);
  PreconditionOptions po = c.pipeline.precondition;
  const VecX a0 = precondition(m, 2, po).a_init;
  OptimizerBudget b = c.pipeline.stage;
  b.max_evaluations = 12;
  const StageResult pi = run_stage(m, "pi", a0, b);
  ASSERT_EQ(pi.status, StageStatus::kOk) << pi.reason;
  EXPECT_LE(pi.evaluation.pi, m.evaluate(a0).pi);
  EXPECT_GE(pi.evaluation.rotor_margin, -b.constraint_tol);
  EXPECT_EQ(pi.run.evaluations, 12);
  EXPECT_EQ(pi.run.history.front().tracked.size(), 3);
}

TEST(Pipeline, ZeroBudgetIsANoOp) {
  RunConfig c = testing::short_config();
  PipelineOptions o = c.pipeline;
  o.seed = 9;
  o.stage.max_evaluations = 0;
  o.precondition.feasibility.max_evaluations = 0;
  o.precondition.terminal.max_evaluations = 0;
  o.precondition.jitter_position = 0.0;
  o.precondition.jitter_yaw = 0.0;
  Mission m = make_mission(c);
  const PipelineResult r = run_pipeline(m, o);
  const VecX& a = r.precondition.a_init;
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    EXPECT_EQ(r.stage(name).a, a) << name;
  }
  EXPECT_TRUE(r.anchors_degenerate);
  EXPECT_EQ(r.sis.status, StageStatus::kSkipped);
  EXPECT_EQ(r.cop.status, StageStatus::kSkipped);
  EXPECT_FALSE(r.accepted);
}

class SmallPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = testing::short_config();
    config_.pipeline.seed = 5;
    config_.pipeline.stage.max_evaluations = 20;
    Mission m(config_.mission, config_.evaluation);
    result_ = run_pipeline(m, config_.pipeline);
  }
  static RunConfig config_;
  static PipelineResult result_;
};
RunConfig SmallPipeline::config_;
PipelineResult SmallPipeline::result_;

TEST_F(SmallPipeline, StagesRunAndAnchorsAreConsistent) {
  const PipelineResult& r = result_;
  for (const char* name : {"pi", "theta", "e2log", "sis", "cop"}) {
    EXPECT_EQ(r.stage(name).status, StageStatus::kOk) << name << ": " << r.stage(name).reason;
  }
  ASSERT_FALSE(r.anchors_degenerate);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(r.anchors.utopia(i), r.cost_matrix(i, i));
    EXPECT_GE(r.anchors.nadir(i), r.anchors.utopia(i));
  }
  EXPECT_LE(r.pi.evaluation.pi, r.init.evaluation.pi);
  EXPECT_LE(r.theta.evaluation.theta, r.init.evaluation.theta);
  EXPECT_LE(r.e2log.evaluation.e2log, r.init.evaluation.e2log);
}

TEST_F(SmallPipeline, VerdictMatchesTheFilter) {
  const PipelineResult& r = result_;
  EXPECT_EQ(r.accepted, posterior_filter(r.sis_utility_cop, r.cop.evaluation.e2log,
                                         r.sis_utility_init, r.init.evaluation.e2log));
  EXPECT_EQ(r.verdict, r.accepted ? "accepted" : "rejected");
}

TEST_F(SmallPipeline, ReturnedPointsAreFeasible) {
  const Mission m(config_.mission, config_.evaluation);
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    const StageResult& s = result_.stage(name);
    EXPECT_TRUE(m.box().contains(s.a)) << name;
    EXPECT_GE(s.evaluation.rotor_margin, -1e-6) << name;
  }
}

TEST_F(SmallPipeline, HistoriesAreMonotone) {
  for (const char* name : {"pi", "theta", "e2log", "sis", "cop"}) {
    const auto& h = result_.stage(name).run.history;
    for (std::size_t i = 1; i < h.size(); ++i) {
      EXPECT_LE(h[i].best_feasible, h[i - 1].best_feasible) << name;
    }
  }
}

TEST_F(SmallPipeline, ExtremeWeightMatchesDedicatedStage) {
  Mission m(config_.mission, config_.evaluation);
  m.set_tail_offset(result_.precondition.tail_offset);
  const StageResult pi_only =
      run_stage(m, "cop", result_.precondition.a_init, config_.pipeline.stage, &result_.anchors,
                Eigen::Vector3d(1, 0, 0), 0.0);
  ASSERT_EQ(pi_only.status, StageStatus::kOk) << pi_only.reason;
  EXPECT_LE(pi_only.evaluation.pi, 1.05 * result_.pi.evaluation.pi);
}

TEST_F(SmallPipeline, Deterministic) {
  Mission m(config_.mission, config_.evaluation);
  const PipelineResult again = run_pipeline(m, config_.pipeline);
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    EXPECT_EQ(again.stage(name).a, result_.stage(name).a) << name;
  }
  EXPECT_EQ(again.cost_matrix, result_.cost_matrix);
  EXPECT_EQ(again.accepted, result_.accepted);
}

}  // namespace
}  // namespace cop
