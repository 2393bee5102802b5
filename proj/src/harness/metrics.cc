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
#include <future>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "softstride/error.h"
#include "softstride/harness.h"

namespace softstride {

long count_transitions(const std::vector<bool>& alpha) {
  long n = 0;
  for (size_t i = 1; i < alpha.size(); ++i) n += alpha[i] != alpha[i - 1];
  return n;
}

double grf_rise_time(const std::vector<double>& force, double dt,
                     double onset) {
  std::vector<double> rises;
  const size_t n = force.size();
  double f_max = 0.0;
  for (double f : force) {
    if (std::isfinite(f)) f_max = std::max(f_max, f);
  }
  size_t i = 0;
  while (i < n) {
    if (force[i] <= onset) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < n && force[j] > onset) ++j;
    // complete segments only
    if (i > 0 && j < n && j - i > 5) {
      size_t ip = i;
      for (size_t k = i; k < j; ++k) {
        if (force[k] > force[ip]) ip = k;
      }
      const double peak = force[ip];
      // loading events only, not threshold flicker
      if (peak < 0.25 * f_max) {
        i = j;
        continue;
      }
      // linear interpolation between samples around each level
      auto crossing = [&](double level) {
        size_t k = i - 1;
        while (k + 1 < ip && force[k + 1] < level) ++k;
        const double f0 = force[k], f1 = force[k + 1];
        const double frac = f1 > f0 ? (level - f0) / (f1 - f0) : 0.0;
        return static_cast<double>(k) + std::clamp(frac, 0.0, 1.0);
      };
      rises.push_back((crossing(0.9 * peak) - crossing(0.1 * peak)) * dt);
    }
    i = j;
  }
  if (rises.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::nth_element(rises.begin(), rises.begin() + rises.size() / 2,
                   rises.end());
  return rises[rises.size() / 2];
}

MetricsReport compute_metrics(const std::vector<EstimateRecord>& trace,
                              const std::vector<McsSample>& truth,
                              const MetricsOptions& options) {
  MetricsReport rep;
  if (trace.empty() || truth.empty()) {
    throw Error(ErrorCode::kEmptyOverlap, "empty trace");
  }
  const double gt_period =
      truth.size() > 1 ? (truth.back().t - truth.front().t) / (truth.size() - 1)
                       : 1e-3;
  const double tol = 0.5 * gt_period + 1e-12;

  Vec3 sq_v = Vec3::Zero();
  double sq_att = 0.0;
  long n_pairs = 0, n_vel = 0;
  const EstimateRecord* last_e = nullptr;
  const McsSample* last_g = nullptr;
  size_t j = 0;
  for (const auto& e : trace) {
    if (e.t < options.skip) continue;
    while (j + 1 < truth.size() &&
           std::abs(truth[j + 1].t - e.t) <= std::abs(truth[j].t - e.t)) {
      ++j;
    }
    const McsSample& g = truth[j];
    if (std::abs(g.t - e.t) > tol) continue;
    ++n_pairs;
    last_e = &e;
    last_g = &g;
    if (g.v.allFinite()) {
      sq_v += (e.v - g.v).cwiseAbs2();
      ++n_vel;
    }
    const double ang = rotation_angle_between(e.r, g.r) * 180.0 / M_PI;
    sq_att += ang * ang;
    if (e.odo_valid && g.v.allFinite()) {
      rep.odometry_error_peak =
          rep.odometry_error_peak.cwiseMax((e.odo_v_n - g.v).cwiseAbs());
    }
  }
  if (n_pairs == 0) {
    throw Error(ErrorCode::kEmptyOverlap, "no time overlap with ground truth");
  }
  rep.position_drift = (last_e->x - last_g->x).cwiseAbs();
  if (n_vel > 0) rep.velocity_rmse = (sq_v / n_vel).cwiseSqrt();
  rep.attitude_rmse_deg = std::sqrt(sq_att / n_pairs);

  const double dt =
      trace.size() > 1 ? (trace.back().t - trace.front().t) / (trace.size() - 1)
                       : 1e-3;
  std::vector<double> all_rises;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    std::vector<bool> alpha;
    std::vector<double> force;
    alpha.reserve(trace.size());
    force.reserve(trace.size());
    for (const auto& e : trace) {
      if (e.t < options.skip) continue;
      alpha.push_back(e.alpha[leg]);
      force.push_back(e.force_norm[leg]);
    }
    rep.transitions[leg] = count_transitions(alpha);
    const double r = grf_rise_time(force, dt, options.rise_onset);
    if (std::isfinite(r)) all_rises.push_back(r);
  }
  if (!all_rises.empty()) {
    std::sort(all_rises.begin(), all_rises.end());
    rep.rise_time = all_rises[all_rises.size() / 2];
  }
  rep.epochs = static_cast<long>(trace.size());
  for (const auto& e : trace) rep.error_epochs += e.error >= 0;
  return rep;
}

void save_metrics(std::ostream& os, const MetricsReport& r) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "{}\nmetric,value\n", kMetricsSchema);
  static const char* kAxes[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    fmt::format_to(out, "drift_{},{:.17g}\n", kAxes[i], r.position_drift[i]);
  }
  for (int i = 0; i < 3; ++i) {
    fmt::format_to(out, "vel_rmse_{},{:.17g}\n", kAxes[i], r.velocity_rmse[i]);
  }
  fmt::format_to(out, "att_rmse_deg,{:.17g}\n", r.attitude_rmse_deg);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    fmt::format_to(out, "transitions_{},{}\n", LegName(leg), r.transitions[leg]);
  }
  fmt::format_to(out, "rise_time,{:.17g}\n", r.rise_time);
  for (int i = 0; i < 3; ++i) {
    fmt::format_to(out, "odo_err_peak_{},{:.17g}\n", kAxes[i],
                   r.odometry_error_peak[i]);
  }
  fmt::format_to(out, "epochs,{}\nerror_epochs,{}\n", r.epochs, r.error_epochs);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<SweepRow> epsilon_sweep(const SimulationLog& log,
                                    const ReplayOptions& base,
                                    std::vector<double> epsilons,
                                    const MetricsOptions& metrics,
                                    int workers) {
  if (epsilons.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs at least 2 values");
  }
  std::sort(epsilons.begin(), epsilons.end());
  const uint64_t digest = log_digest(log);
  if (workers <= 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  std::vector<SweepRow> rows(epsilons.size());
  auto run_one = [&](size_t i) {
    ReplayOptions opt = base;
    opt.estimator.detector.epsilon = epsilons[i];
    const auto trace = replay(log, opt);
    rows[i].epsilon = epsilons[i];
    rows[i].log_digest = digest;
    rows[i].report = compute_metrics(trace, log.mcs, metrics);
  };
  size_t next = 0;
  while (next < epsilons.size()) {
    std::vector<std::future<void>> batch;
    for (int w = 0; w < workers && next < epsilons.size(); ++w, ++next) {
      batch.push_back(std::async(std::launch::async, run_one, next));
    }
    for (auto& f : batch) f.get();
  }
  return rows;
}

void save_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out,
                 "epsilon,log_digest,drift_x,drift_y,drift_z,vel_rmse_x,"
                 "vel_rmse_y,vel_rmse_z,att_rmse_deg,transitions,rise_time\n");
  for (const auto& row : rows) {
    const auto& r = row.report;
    long tr = 0;
    for (long t : r.transitions) tr += t;
    fmt::format_to(out,
                   "{:.17g},{:016x},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                   "{:.17g},{:.17g},{},{:.17g}\n",
                   row.epsilon, row.log_digest, r.position_drift.x(),
                   r.position_drift.y(), r.position_drift.z(),
                   r.velocity_rmse.x(), r.velocity_rmse.y(),
                   r.velocity_rmse.z(), r.attitude_rmse_deg, tr, r.rise_time);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace softstride
