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

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "softstride/error.h"
#include "softstride/harness.h"

namespace softstride {
namespace {

using Sink = std::function<void(std::string_view)>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void Put(fmt::memory_buffer& buf, double v) {
  fmt::format_to(std::back_inserter(buf), ",{:.17g}", v);
}

void Put3(fmt::memory_buffer& buf, const Vec3& v) {
  for (int i = 0; i < 3; ++i) Put(buf, v[i]);
}

void WriteLog(const SimulationLog& log, const Sink& sink) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kLogSchema);
  const auto cols = LogColumns();
  for (size_t i = 0; i < cols.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{}{}", i ? "," : "", cols[i]);
  }
  buf.push_back('\n');
  const bool has_truth = log.truth.size() == log.t.size();
  const Vec3 nan3 = Vec3::Constant(kNaN);
  size_t j = 0;
  for (size_t k = 0; k < log.t.size(); ++k) {
    const double t = log.t[k];
    fmt::format_to(std::back_inserter(buf), "{:.17g}", t);
    const SensorSample& s = log.sensors[k];
    Put3(buf, s.imu.gyro);
    Put3(buf, s.imu.accel);
    for (const LegState& leg : s.legs) {
      Put3(buf, leg.q);
      Put3(buf, leg.q_dot);
      Put3(buf, leg.tau);
    }
    if (has_truth) {
      const TruthSample& tr = log.truth[k];
      Put3(buf, tr.x);
      Put3(buf, tr.v);
      for (int r = 0; r < 3; ++r) Put3(buf, tr.r.row(r).transpose());
      Put3(buf, tr.omega);
      for (int leg = 0; leg < kNumLegs; ++leg) {
        Put3(buf, tr.force_n[leg]);
        Put(buf, tr.penetration[leg]);
      }
    } else {
      for (int i = 0; i < 3 + 3 + 9 + 3 + 16; ++i) Put(buf, kNaN);
    }
    while (j < log.mcs.size() && log.mcs[j].t < t - 1e-9) ++j;
    if (j < log.mcs.size() && std::abs(log.mcs[j].t - t) <= 1e-9) {
      Put3(buf, log.mcs[j].x);
    } else {
      Put3(buf, nan3);
    }
    buf.push_back('\n');
    if (buf.size() > (1 << 16)) {
      sink(std::string_view(buf.data(), buf.size()));
      buf.clear();
    }
  }
  sink(std::string_view(buf.data(), buf.size()));
}

std::vector<std::string_view> Split(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double ParseDouble(std::string_view field, long line) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (field.empty()) return kNaN;
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kParseError,
                fmt::format("line {}: bad number '{}'", line, field), line);
  }
  return v;
}

std::string StripCr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<std::string> LogColumns() {
  std::vector<std::string> c = {"t"};
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("gyro_{}", a));
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("acc_{}", a));
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const char* kind : {"q", "qd", "tau"}) {
      for (int j = 0; j < 3; ++j) {
        c.push_back(fmt::format("{}_{}{}", LegName(leg), kind, j));
      }
    }
  }
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("gt_{}", a));
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("gt_v{}", a));
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) c.push_back(fmt::format("gt_r{}{}", r, k));
  }
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("gt_w{}", a));
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const char* a : {"fx", "fy", "fz", "pen"}) {
      c.push_back(fmt::format("gt_{}_{}", LegName(leg), a));
    }
  }
  for (const char* a : {"x", "y", "z"}) c.push_back(fmt::format("mcs_{}", a));
  return c;
}

void save_log(std::ostream& os, const SimulationLog& log) {
  WriteLog(log, [&](std::string_view chunk) {
    os.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  });
}

uint64_t log_digest(const SimulationLog& log) {
  uint64_t h = 1469598103934665603ULL;
  WriteLog(log, [&](std::string_view chunk) {
    for (unsigned char ch : chunk) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  });
  return h;
}

SimulationLog load_log(std::istream& is) {
  std::string line;
  long line_no = 1;
  if (!std::getline(is, line) || StripCr(line) != kLogSchema) {
    throw Error(ErrorCode::kSchemaMismatch, "missing 'softstride-log v1' header");
  }
  const auto cols = LogColumns();
  ++line_no;
  if (!std::getline(is, line)) {
    throw Error(ErrorCode::kSchemaMismatch, "missing column header");
  }
  {
    const std::string hdr = StripCr(line);
    const auto names = Split(hdr);
    bool ok = names.size() == cols.size();
    for (size_t i = 0; ok && i < names.size(); ++i) ok = names[i] == cols[i];
    if (!ok) throw Error(ErrorCode::kSchemaMismatch, "column header differs");
  }

  SimulationLog log;
  bool any_truth = false;
  std::vector<double> v(cols.size());
  while (std::getline(is, line)) {
    ++line_no;
    const std::string row = StripCr(line);
    if (row.empty()) continue;
    const auto fields = Split(row);
    if (fields.size() != cols.size()) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("line {}: expected {} fields, got {}", line_no,
                              cols.size(), fields.size()),
                  line_no);
    }
    for (size_t i = 0; i < fields.size(); ++i) {
      v[i] = ParseDouble(fields[i], line_no);
    }
    const double t = v[0];
    if (!std::isfinite(t)) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("line {}: missing timestamp", line_no), line_no);
    }
    if (!log.t.empty() && !(t > log.t.back())) {
      throw Error(ErrorCode::kNonMonotonicTime,
                  fmt::format("line {}: timestamp not increasing", line_no),
                  line_no);
    }
    size_t c = 1;
    auto take3 = [&]() {
      Vec3 out(v[c], v[c + 1], v[c + 2]);
      c += 3;
      return out;
    };
    SensorSample s;
    s.imu.gyro = take3();
    s.imu.accel = take3();
    for (LegState& leg : s.legs) {
      leg.q = take3();
      leg.q_dot = take3();
      leg.tau = take3();
    }
    TruthSample tr;
    tr.x = take3();
    tr.v = take3();
    for (int r = 0; r < 3; ++r) tr.r.row(r) = take3().transpose();
    tr.omega = take3();
    for (int leg = 0; leg < kNumLegs; ++leg) {
      tr.force_n[leg] = take3();
      tr.penetration[leg] = v[c++];
    }
    const Vec3 mcs = take3();
    const bool has_truth = tr.x.allFinite();
    any_truth = any_truth || has_truth;
    log.t.push_back(t);
    log.sensors.push_back(s);
    log.truth.push_back(tr);
    if (mcs.allFinite()) {
      McsSample m;
      m.t = t;
      m.x = mcs;
      m.r = has_truth ? tr.r : RotationMatrix::Identity();
      m.v = has_truth ? tr.v : Vec3::Constant(kNaN);
      log.mcs.push_back(m);
    }
  }
  if (!any_truth) log.truth.clear();
  if (log.t.size() >= 2) {
    log.dt = (log.t.back() - log.t.front()) / (log.t.size() - 1);
    for (size_t k = 1; k < log.t.size(); ++k) {
      const double h = log.t[k] - log.t[k - 1];
      if (std::abs(h - log.dt) > 0.01 * log.dt) {
        const long ln = static_cast<long>(k) + 3;
        throw Error(ErrorCode::kParseError,
                    fmt::format("line {}: sample period deviates >1%", ln), ln);
      }
    }
  }
  return log;
}

void save_log_file(const std::string& path, const SimulationLog& log) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  save_log(os, log);
}

SimulationLog load_log_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  return load_log(is);
}

}  // namespace softstride
