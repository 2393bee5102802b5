// Copyright 2026 The softstride Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "softstride/harness.h"

namespace softstride {
namespace {

ScenarioConfig Scenario(const TerrainModel& terrain, double duration) {
  ScenarioConfig c;
  c.model.terrain = terrain;
  c.duration = duration;
  return c;
}

TEST(EndToEnd, RigidLogHasOneEpochPerMillisecond) {
  const SimulationLog log = run_scenario(Scenario(TerrainModel::Rigid(), 300.0));
  EXPECT_EQ(log.t.size(), 300000u);
  EXPECT_EQ(log.mcs.size(), 75000u);
}

TEST(EndToEnd, NoiseFreeRigidTrotTracksVelocity) {
  ScenarioConfig c = Scenario(TerrainModel::Rigid(), 300.0);
  c.noise = SensorNoiseParams::Zero();
  c.mcs_noise = 0.0;
  const SimulationLog log = run_scenario(c);
  const auto trace = replay(log, ReplayOptions{});
  const MetricsReport r = compute_metrics(trace, log.mcs);
  EXPECT_EQ(r.error_epochs, 0);
  for (int i = 0; i < 3; ++i) EXPECT_LT(r.velocity_rmse[i], 0.01) << i;
}

TEST(EndToEnd, NoisyRigidTrotWithinBaseline) {
  const SimulationLog log = run_scenario(Scenario(TerrainModel::Rigid(), 300.0));
  const MetricsReport r = compute_metrics(replay(log, ReplayOptions{}), log.mcs);
  EXPECT_LT(r.position_drift.z(), 0.05);
  for (int i = 0; i < 3; ++i) EXPECT_LT(r.velocity_rmse[i], 0.05) << i;
}

TEST(EndToEnd, FoamSlowsGrfLoading) {
  const ReplayOptions opt;
  const SimulationLog rigid = run_scenario(Scenario(TerrainModel::Rigid(), 20.0));
  const SimulationLog soft = run_scenario(Scenario(TerrainModel::Soft(), 20.0));
  const double t_rigid = compute_metrics(replay(rigid, opt), rigid.mcs).rise_time;
  const double t_soft = compute_metrics(replay(soft, opt), soft.mcs).rise_time;
  EXPECT_GT(t_soft, t_rigid);
}

}  // namespace
}  // namespace softstride
