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

// softstride_acceptance: end-to-end acceptance checks A1..A8.
//
//   softstride_acceptance [--only A3] [--config-dir DIR]
//
// Prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria (capped at 125).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "softstride/harness.h"
#include "softstride/so3.h"

namespace softstride {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// one simulated scenario with its default replay and metrics
struct Run {
  ExperimentConfig config;
  SimulationLog log;
  MetricsReport report;
  double seconds = 0.0;
};

class Fixtures {
 public:
  explicit Fixtures(std::string config_dir) : dir_(std::move(config_dir)) {}

  ExperimentConfig Config(const std::string& name) const {
    return load_config_file(dir_ + "/" + name + ".yaml");
  }

  const Run& Rigid() { return Get("rigid", Config("rigid")); }

  const Run& Soft(double d) {
    ExperimentConfig c = Config("soft");
    c.scenario.model.terrain.regions[0].d = d;
    return Get(fmt::format("soft-d{}", d), c);
  }

 private:
  const Run& Get(const std::string& key, const ExperimentConfig& config) {
    auto it = runs_.find(key);
    if (it != runs_.end()) return *it->second;
    auto run = std::make_unique<Run>();
    run->config = config;
    const auto start = Clock::now();
    run->log = run_scenario(config.scenario);
    run->report =
        compute_metrics(replay(run->log, config.replay), run->log.mcs, config.metrics);
    run->seconds = Seconds(start);
    return *runs_.emplace(key, std::move(run)).first->second;
  }

  std::string dir_;
  std::map<std::string, std::unique_ptr<Run>> runs_;
};

Mat3 UniformRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q;
  q.coeffs() << n(rng), n(rng), n(rng), n(rng);
  return q.normalized().toRotationMatrix();
}

Verdict A1(Fixtures&) {
  const auto start = Clock::now();
  const NloGains gains;
  std::mt19937_64 rng(2024);
  int converged = 0;
  bool bias_ok = true;
  double worst = 0.0;
  for (int run = 0; run < 100; ++run) {
    const Mat3 r_true = UniformRotation(rng);
    NloState s;
    s.r_hat = UniformRotation(rng);
    std::vector<VectorMeasurementPair> pairs(2);
    pairs[0].y_n = Vec3::UnitZ();
    pairs[1].y_n = Vec3(1.0, 1.0, 0.0).normalized();
    for (auto& m : pairs) m.y_b = r_true.transpose() * m.y_n;
    for (int i = 0; i < 2000; ++i) {
      s = nlo_step(s, gains, Vec3::Zero(), pairs, 1e-3);
      bias_ok = bias_ok && s.b_hat.norm() <= gains.m_b * (1.0 + 1e-12);
    }
    const double err = rotation_angle_between(s.r_hat, r_true) * 180.0 / M_PI;
    worst = std::max(worst, err);
    if (err < 1.0) ++converged;
  }
  const double secs = Seconds(start);
  return {converged == 100 && bias_ok && secs < 30.0,
          fmt::format("converged {}/100, worst {:.3f} deg, bias bound {}, {:.2f} s",
                      converged, worst, bias_ok ? "held" : "violated", secs)};
}

Verdict A2(Fixtures& fx) {
  const Run& r = fx.Rigid();
  const MetricsReport& m = r.report;
  const bool pass = m.position_drift.z() < 0.05 && (m.velocity_rmse.array() < 0.05).all() &&
                    r.seconds < 120.0;
  return {pass, fmt::format("z drift {:.4f} m, velocity RMSE [{:.4f} {:.4f} {:.4f}] m/s, "
                            "{:.1f} s",
                            m.position_drift.z(), m.velocity_rmse.x(), m.velocity_rmse.y(),
                            m.velocity_rmse.z(), r.seconds)};
}

Verdict A3(Fixtures& fx) {
  const MetricsReport& rigid = fx.Rigid().report;
  bool pass = true;
  std::string detail = fmt::format("rigid z drift {:.4f}, spike {:.4f};",
                                   rigid.position_drift.z(), rigid.odometry_error_peak.z());
  for (double d : {10.0, 50.0, 200.0}) {
    const MetricsReport& soft = fx.Soft(d).report;
    const double drift_ratio = soft.position_drift.z() / rigid.position_drift.z();
    const double spike_ratio = soft.odometry_error_peak.z() / rigid.odometry_error_peak.z();
    pass = pass && drift_ratio >= 3.0 && spike_ratio >= 2.0;
    detail += fmt::format(" d={:g}: drift x{:.1f}, spike x{:.1f};", d, drift_ratio,
                          spike_ratio);
  }
  detail.pop_back();
  return {pass, detail};
}

Verdict A4(Fixtures& fx) {
  const double rigid = fx.Rigid().report.rise_time;
  const double soft = fx.Soft(50.0).report.rise_time;
  const double ratio = soft / rigid;
  return {std::isfinite(ratio) && ratio >= 2.0,
          fmt::format("rise time rigid {:.4f} s, soft {:.4f} s, ratio {:.1f}", rigid, soft,
                      ratio)};
}

double TransitionsPerLegCycle(const Run& run, const ReplayOptions& options) {
  const MetricsReport m =
      compute_metrics(replay(run.log, options), run.log.mcs, run.config.metrics);
  long total = 0;
  for (long n : m.transitions) total += n;
  const double cycles = run.config.scenario.duration / run.config.scenario.model.gait.period;
  return static_cast<double>(total) / kNumLegs / cycles;
}

Verdict A5(Fixtures& fx) {
  const Run& soft = fx.Soft(50.0);
  const double eps = soft.config.replay.estimator.detector.epsilon;
  ReplayOptions plain = soft.config.replay;
  plain.grf_noise_sigma = eps / 10.0;
  plain.estimator.detector.mode = ContactDetectorConfig::Mode::kPlain;
  ReplayOptions schmitt = plain;
  schmitt.estimator.detector.mode = ContactDetectorConfig::Mode::kSchmitt;
  schmitt.estimator.detector.hysteresis_band = eps / 2.0;

  const double ideal = 2.0;
  const double n_plain = TransitionsPerLegCycle(soft, plain);
  const double n_schmitt = TransitionsPerLegCycle(soft, schmitt);
  const bool pass = n_plain >= 1.5 * ideal && std::abs(n_schmitt - ideal) <= 0.1 * ideal;
  return {pass, fmt::format("transitions per leg per cycle: plain {:.2f}, schmitt {:.2f}, "
                            "ideal {:.0f}",
                            n_plain, n_schmitt, ideal)};
}

int Inversions(const std::vector<double>& v, bool increasing) {
  int n = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (increasing ? v[i] < v[i - 1] : v[i] > v[i - 1]) ++n;
  }
  return n;
}

Verdict A6(Fixtures& fx) {
  const Run& soft = fx.Soft(50.0);
  const auto rows = epsilon_sweep(soft.log, soft.config.replay, soft.config.sweep_epsilons,
                                  soft.config.metrics, soft.config.workers);
  std::vector<double> z, xy;
  std::string table;
  for (const auto& r : rows) {
    z.push_back(r.report.position_drift.z());
    xy.push_back(r.report.velocity_rmse.head<2>().norm());
    table += fmt::format(" eps {:g}: z {:.3f} xy {:.5f};", r.epsilon, z.back(), xy.back());
  }
  table.pop_back();
  const int z_inv = Inversions(z, false);
  const int xy_inv = Inversions(xy, true);
  return {rows.size() >= 5 && z_inv <= 1 && xy_inv <= 1,
          fmt::format("z inversions {}, xy inversions {};{}", z_inv, xy_inv, table)};
}

// worst |J - finite difference| over random joint samples
double JacobianGap(const RobotParams& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> q0(-0.6, 0.3), q1(-1.0, 1.0), q2(-2.4, -0.3);
  double worst = 0.0;
  const double h = 1e-6;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 q(q0(rng), q1(rng), q2(rng));
      const Mat3 j = foot_jacobian(p, leg, q);
      Mat3 fd;
      for (int c = 0; c < 3; ++c) {
        const Vec3 dq = Vec3::Unit(c) * h;
        fd.col(c) = (leg_forward_kinematics(p, leg, q + dq) -
                     leg_forward_kinematics(p, leg, q - dq)) /
                    (2.0 * h);
      }
      worst = std::max(worst, (j - fd).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double GrfRoundTrip(const RobotParams& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> q1(-0.8, 0.8), q2(-2.2, -0.5), f(-200.0, 200.0);
  ContactDetectorConfig det;
  double worst = 0.0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int i = 0; i < 50; ++i) {
      LegState s;
      s.q = Vec3(0.1 * q1(rng), q1(rng), q2(rng));
      const Vec3 force(f(rng), f(rng), 400.0 + f(rng));
      s.tau = torques_for_foot_force(p, leg, s, force);
      const ContactEstimate e = estimate_grf(p, leg, s, det, false);
      worst = std::max(worst, (e.grf - force).norm() / force.norm());
    }
  }
  return worst;
}

double SkewVexGap(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v(n(rng), n(rng), n(rng));
    worst = std::max(worst, (vex(skew(v)) - v).cwiseAbs().maxCoeff());
  }
  return worst;
}

double OrthonormalityAfterSteps() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  RotationMatrix r = RotationMatrix::Identity();
  for (int i = 0; i < 100000; ++i) {
    r = integrate_rotation(r, Vec3(n(rng), n(rng), n(rng)), 1e-3);
  }
  return (r.transpose() * r - Mat3::Identity()).norm();
}

double PinnedFeetOdometryGap(const RobotParams& p) {
  const Vec3 v_b(0.3, -0.1, 0.05);
  std::array<LegState, kNumLegs> legs;
  std::array<ContactEstimate, kNumLegs> contacts;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 foot = hfe_position(p, leg) + Vec3(0.0, 0.0, -0.5);
    legs[leg].q = leg_inverse_kinematics(p, leg, foot);
    legs[leg].q_dot = foot_jacobian(p, leg, legs[leg].q).inverse() * (-v_b);
    contacts[leg].alpha = true;
  }
  return (leg_odometry(legs, contacts, Vec3::Zero(), p).v_b - v_b).norm();
}

// steps of the rigid replay whose KF covariance is not symmetric PD
long CovarianceFailures(const Run& rigid) {
  const SimulationLog& log = rigid.log;
  const EstimatorConfig& cfg = rigid.config.replay.estimator;
  EstimatorState state = InitialEstimatorState(log.mcs.front().x, log.mcs.front().r);
  long bad = 0;
  for (size_t k = 0; k < log.t.size(); ++k) {
    const double dt = k == 0 ? log.dt : log.t[k] - log.t[k - 1];
    state = estimator_pipeline_step(cfg, state, log.sensors[k].imu, log.sensors[k].legs, dt)
                .state;
    if (!is_symmetric_pd(state.fusion.p)) ++bad;
  }
  return bad;
}

double StandingLoad() {
  SimModel m;
  m.gait_enabled = false;
  m.attitude.amplitude.setZero();
  SimState s = InitialSimState(m);
  for (int i = 0; i < 3000; ++i) s = step_dynamics(s, m, 1e-3);
  double fz = 0.0;
  for (const Vec3& f : s.force_n) fz += f.z();
  return fz;
}

Verdict A7(Fixtures& fx) {
  const auto start = Clock::now();
  const RobotParams p;
  std::mt19937_64 rng(7);
  const double jac = JacobianGap(p, rng);
  const double grf = GrfRoundTrip(p, rng);
  const double vex_gap = SkewVexGap(rng);
  const double ortho = OrthonormalityAfterSteps();
  const double odo = PinnedFeetOdometryGap(p);
  const double load = StandingLoad();
  const double weight = p.trunk_mass * p.gravity_magnitude;
  const double oracle_secs = Seconds(start);
  const long cov_bad = CovarianceFailures(fx.Rigid());

  const bool pass = jac < 1e-6 && grf < 1e-9 && vex_gap == 0.0 && ortho < 1e-9 &&
                    odo < 1e-9 && std::abs(load - weight) <= 1e-3 * weight &&
                    cov_bad == 0 && oracle_secs < 10.0;
  return {pass,
          fmt::format("jacobian {:.1e}, grf {:.1e}, skew/vex {:.1e}, orthonormality {:.1e}, "
                      "odometry {:.1e}, standing load {:.2f} N, covariance not PD on {} "
                      "steps, {:.2f} s",
                      jac, grf, vex_gap, ortho, odo, load, cov_bad, oracle_secs)};
}

std::string MetricsText(const MetricsReport& m) {
  std::ostringstream os;
  save_metrics(os, m);
  return os.str();
}

Verdict A8(Fixtures& fx) {
  bool pass = true;
  std::string detail;
  for (const std::string name : {"rigid", "soft"}) {
    const ExperimentConfig c = fx.Config(name);
    std::string text[2];
    uint64_t digest[2];
    for (int i = 0; i < 2; ++i) {
      const SimulationLog log = run_scenario(c.scenario);
      digest[i] = log_digest(log);
      text[i] = MetricsText(compute_metrics(replay(log, c.replay), log.mcs, c.metrics));
    }
    const bool same = digest[0] == digest[1] && text[0] == text[1];
    pass = pass && same;
    detail += fmt::format(" {}: log {:016x} {}, metrics {};", name, digest[0],
                          digest[0] == digest[1] ? "identical" : "differs",
                          text[0] == text[1] ? "identical" : "differ");
  }
  detail.pop_back();
  return {pass, detail.substr(1)};
}

}  // namespace
}  // namespace softstride

int main(int argc, char** argv) {
  using namespace softstride;
  CLI::App app{"softstride acceptance checks"};
  std::vector<std::string> only;
  std::string config_dir = SOFTSTRIDE_CONFIG_DIR;
  app.add_option("--only", only, "run only these criteria (A1..A8)");
  app.add_option("--config-dir", config_dir, "directory with rigid.yaml and soft.yaml");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict(Fixtures&)>>> criteria = {
      {"A1", A1}, {"A2", A2}, {"A3", A3}, {"A4", A4},
      {"A5", A5}, {"A6", A6}, {"A7", A7}, {"A8", A8}};
  for (const auto& id : only) {
    if (std::none_of(criteria.begin(), criteria.end(),
                     [&](const auto& c) { return c.first == id; })) {
      fmt::print(stderr, "unknown criterion {}\n", id);
      return 1;
    }
  }

  Fixtures fx(config_dir);
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    try {
      v = check(fx);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    fmt::print("{} {} {}\n", id, v.pass ? "PASS" : "FAIL", v.detail);
    std::fflush(stdout);
  }
  return std::min(failed, 125);
}
