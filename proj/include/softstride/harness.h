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

#ifndef SOFTSTRIDE_HARNESS_H_
#define SOFTSTRIDE_HARNESS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "softstride/estimator.h"
#include "softstride/terrain_sim.h"

namespace softstride {

inline constexpr const char* kLogSchema = "softstride-log v1";
inline constexpr const char* kEstimateSchema = "softstride-estimates v1";
inline constexpr const char* kMetricsSchema = "softstride-metrics v1";

// ---- log format ----

std::vector<std::string> LogColumns();
void save_log(std::ostream& os, const SimulationLog& log);
// throws kSchemaMismatch, kNonMonotonicTime, kParseError(line)
SimulationLog load_log(std::istream& is);
void save_log_file(const std::string& path, const SimulationLog& log);
SimulationLog load_log_file(const std::string& path);
// FNV-1a of the serialized log
uint64_t log_digest(const SimulationLog& log);

// ---- replay ----

struct EstimateRecord {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  RotationMatrix r = RotationMatrix::Identity();
  std::array<bool, kNumLegs> alpha = {false, false, false, false};
  std::array<double, kNumLegs> force_norm = {0.0, 0.0, 0.0, 0.0};
  Vec3 odo_v_n = Vec3::Zero();  // R_hat * odometry velocity
  bool odo_valid = false;
  Vec6 p_diag = Vec6::Zero();
  int error = -1;  // ErrorCode value, -1 if none
};

struct ReplayOptions {
  EstimatorConfig estimator;
  // Gaussian noise added to each estimated GRF component (N)
  double grf_noise_sigma = 0.0;
  uint64_t seed = 1;
};

std::vector<EstimateRecord> replay(const SimulationLog& log,
                                   const ReplayOptions& options);

void save_estimates(std::ostream& os, const std::vector<EstimateRecord>& trace);
std::vector<EstimateRecord> load_estimates(std::istream& is);
// long format: t,signal,value
void save_estimates_tidy(std::ostream& os,
                         const std::vector<EstimateRecord>& trace);

// ---- metrics ----

struct MetricsReport {
  Vec3 position_drift = Vec3::Zero();  // |x_hat - x_truth| at the end
  Vec3 velocity_rmse = Vec3::Zero();
  double attitude_rmse_deg = 0.0;
  std::array<long, kNumLegs> transitions = {0, 0, 0, 0};
  double rise_time = 0.0;  // median 10-90% GRF loading time
  Vec3 odometry_error_peak = Vec3::Zero();  // max |R v_odo - v_truth|
  long epochs = 0;
  long error_epochs = 0;
};

struct MetricsOptions {
  // contact segments start where force_norm exceeds this level
  double rise_onset = 10.0;
  // ignore data before this time (s)
  double skip = 0.0;
};

// ground truth is associated by nearest timestamp within half its period.
// throws kEmptyOverlap
MetricsReport compute_metrics(const std::vector<EstimateRecord>& trace,
                              const std::vector<McsSample>& truth,
                              const MetricsOptions& options = {});

long count_transitions(const std::vector<bool>& alpha);
// median rise time over segments; NaN if none
double grf_rise_time(const std::vector<double>& force, double dt,
                     double onset);

void save_metrics(std::ostream& os, const MetricsReport& report);

// ---- epsilon sweep ----

struct SweepRow {
  double epsilon = 0.0;
  uint64_t log_digest = 0;
  MetricsReport report;
};

std::vector<SweepRow> epsilon_sweep(const SimulationLog& log,
                                    const ReplayOptions& base,
                                    std::vector<double> epsilons,
                                    const MetricsOptions& metrics = {},
                                    int workers = 0);

void save_sweep(std::ostream& os, const std::vector<SweepRow>& rows);

// ---- experiment config ----

struct ExperimentConfig {
  ScenarioConfig scenario;
  ReplayOptions replay;
  MetricsOptions metrics;
  std::vector<double> sweep_epsilons = {10.0, 18.0, 32.0, 56.0, 100.0};
  int workers = 0;
};

// YAML; unknown keys raise kSchemaMismatch
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

}  // namespace softstride

#endif  // SOFTSTRIDE_HARNESS_H_
