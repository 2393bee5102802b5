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

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include <fmt/format.h>

#include "softstride/error.h"
#include "softstride/harness.h"

namespace softstride {

std::vector<EstimateRecord> replay(const SimulationLog& log,
                                   const ReplayOptions& options) {
  const EstimatorConfig& cfg = options.estimator;
  Vec3 x0 = Vec3::Zero();
  RotationMatrix r0 = RotationMatrix::Identity();
  if (!log.mcs.empty()) {
    x0 = log.mcs.front().x;
    r0 = log.mcs.front().r;
  } else if (!log.truth.empty()) {
    x0 = log.truth.front().x;
    r0 = log.truth.front().r;
  }
  EstimatorState state = InitialEstimatorState(x0, r0);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<EstimateRecord> trace;
  trace.reserve(log.t.size());
  for (size_t k = 0; k < log.t.size(); ++k) {
    const double dt = k == 0 ? log.dt : log.t[k] - log.t[k - 1];
    std::array<LegState, kNumLegs> legs = log.sensors[k].legs;
    if (options.grf_noise_sigma > 0.0) {
      // tau' = tau - J^T n shifts the estimated force by exactly n
      for (int leg = 0; leg < kNumLegs; ++leg) {
        Vec3 n;
        for (int i = 0; i < 3; ++i) n[i] = options.grf_noise_sigma * normal(rng);
        if (!legs[leg].AllFinite()) continue;
        legs[leg].tau -=
            foot_jacobian(cfg.robot, leg, legs[leg].q).transpose() * n;
      }
    }
    const StepResult res =
        estimator_pipeline_step(cfg, state, log.sensors[k].imu, legs, dt);
    state = res.state;

    EstimateRecord rec;
    rec.t = log.t[k];
    rec.x = state.fusion.x_n;
    rec.v = state.fusion.v_n;
    rec.r = state.attitude.r_hat;
    rec.alpha = res.diagnostics.alpha;
    rec.force_norm = res.diagnostics.force_norm;
    rec.odo_valid = res.diagnostics.odometry.valid;
    rec.odo_v_n = rec.odo_valid ? Vec3(rec.r * res.diagnostics.odometry.v_b)
                                : Vec3::Zero();
    rec.p_diag = state.fusion.p.diagonal();
    rec.error = res.diagnostics.error ? static_cast<int>(*res.diagnostics.error)
                                      : -1;
    trace.push_back(rec);
  }
  return trace;
}

namespace {

std::vector<std::string> EstimateColumns() {
  std::vector<std::string> c = {"t", "x", "y", "z", "vx", "vy", "vz"};
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) c.push_back(fmt::format("r{}{}", r, k));
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    c.push_back(fmt::format("alpha_{}", LegName(leg)));
    c.push_back(fmt::format("fnorm_{}", LegName(leg)));
  }
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("odo_v{}", a));
  c.push_back("odo_valid");
  for (int i = 0; i < 6; ++i) c.push_back(fmt::format("p{}", i));
  c.push_back("error");
  return c;
}

}  // namespace

void save_estimates(std::ostream& os, const std::vector<EstimateRecord>& trace) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "{}\n", kEstimateSchema);
  const auto cols = EstimateColumns();
  for (size_t i = 0; i < cols.size(); ++i) {
    fmt::format_to(out, "{}{}", i ? "," : "", cols[i]);
  }
  buf.push_back('\n');
  for (const auto& e : trace) {
    fmt::format_to(out, "{:.17g}", e.t);
    for (int i = 0; i < 3; ++i) fmt::format_to(out, ",{:.17g}", e.x[i]);
    for (int i = 0; i < 3; ++i) fmt::format_to(out, ",{:.17g}", e.v[i]);
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) fmt::format_to(out, ",{:.17g}", e.r(r, k));
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      fmt::format_to(out, ",{},{:.17g}", e.alpha[leg] ? 1 : 0,
                     e.force_norm[leg]);
    }
    for (int i = 0; i < 3; ++i) fmt::format_to(out, ",{:.17g}", e.odo_v_n[i]);
    fmt::format_to(out, ",{}", e.odo_valid ? 1 : 0);
    for (int i = 0; i < 6; ++i) fmt::format_to(out, ",{:.17g}", e.p_diag[i]);
    fmt::format_to(out, ",{}\n", e.error);
    if (buf.size() > (1 << 16)) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<EstimateRecord> load_estimates(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind(kEstimateSchema, 0) != 0) {
    throw Error(ErrorCode::kSchemaMismatch, "missing estimates header");
  }
  const auto cols = EstimateColumns();
  std::getline(is, line);
  std::vector<EstimateRecord> trace;
  long line_no = 2;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    size_t start = 0;
    while (start <= line.size()) {
      size_t pos = line.find(',', start);
      if (pos == std::string::npos) pos = line.size();
      try {
        v.push_back(std::stod(line.substr(start, pos - start)));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError,
                    fmt::format("line {}: bad number", line_no), line_no);
      }
      start = pos + 1;
    }
    if (v.size() != cols.size()) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("line {}: wrong field count", line_no), line_no);
    }
    EstimateRecord e;
    size_t c = 0;
    e.t = v[c++];
    for (int i = 0; i < 3; ++i) e.x[i] = v[c++];
    for (int i = 0; i < 3; ++i) e.v[i] = v[c++];
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) e.r(r, k) = v[c++];
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      e.alpha[leg] = v[c++] != 0.0;
      e.force_norm[leg] = v[c++];
    }
    for (int i = 0; i < 3; ++i) e.odo_v_n[i] = v[c++];
    e.odo_valid = v[c++] != 0.0;
    for (int i = 0; i < 6; ++i) e.p_diag[i] = v[c++];
    e.error = static_cast<int>(v[c++]);
    if (!trace.empty() && !(e.t > trace.back().t)) {
      throw Error(ErrorCode::kNonMonotonicTime,
                  fmt::format("line {}: timestamp not increasing", line_no),
                  line_no);
    }
    trace.push_back(e);
  }
  return trace;
}

void save_estimates_tidy(std::ostream& os,
                         const std::vector<EstimateRecord>& trace) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "t,signal,value\n");
  static const char* kAxes[3] = {"x", "y", "z"};
  for (const auto& e : trace) {
    for (int i = 0; i < 3; ++i) {
      fmt::format_to(out, "{:.17g},pos_{},{:.17g}\n", e.t, kAxes[i], e.x[i]);
    }
    for (int i = 0; i < 3; ++i) {
      fmt::format_to(out, "{:.17g},vel_{},{:.17g}\n", e.t, kAxes[i], e.v[i]);
    }
    if (e.odo_valid) {
      for (int i = 0; i < 3; ++i) {
        fmt::format_to(out, "{:.17g},odo_v{},{:.17g}\n", e.t, kAxes[i],
                       e.odo_v_n[i]);
      }
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      fmt::format_to(out, "{:.17g},alpha_{},{}\n", e.t, LegName(leg),
                     e.alpha[leg] ? 1 : 0);
      fmt::format_to(out, "{:.17g},fnorm_{},{:.17g}\n", e.t, LegName(leg),
                     e.force_norm[leg]);
    }
    if (buf.size() > (1 << 16)) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace softstride
