// Copyright 2026 The cpseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "cpseq/su2.hpp"

namespace cpseq {

/// One rectangular pulse: rotation by `angle` about the XY-plane axis at `phase`.
/// The angle is kept non-negative; a negative request is stored as the
/// opposite axis.
class Pulse {
 public:
  Pulse() = default;
  Pulse(double angle, double phase) {
    if (!std::isfinite(angle) || !std::isfinite(phase))
      throw DomainError("Pulse: angle and phase must be finite");
    if (angle < 0.0) {
      angle = -angle;
      phase += kPi;
    }
    angle_ = angle;
    phase_ = wrap_phase(phase);
  }

  double angle() const { return angle_; }
  double phase() const { return phase_; }
  Su2Vector axis() const { return Su2Vector::axis(phase_); }

  friend bool operator==(const Pulse&, const Pulse&) = default;

 private:
  double angle_ = 0.0;
  double phase_ = 0.0;
};

/// Pulses in execution order: element 0 acts first.
class PulseSequence {
 public:
  PulseSequence(std::vector<Pulse> pulses) : pulses_(std::move(pulses)) {
    if (pulses_.empty()) throw DomainError("PulseSequence: a sequence needs at least one pulse");
  }
  PulseSequence(std::initializer_list<Pulse> pulses) : PulseSequence(std::vector<Pulse>(pulses)) {}

  std::span<const Pulse> pulses() const { return pulses_; }
  std::size_t size() const { return pulses_.size(); }
  const Pulse& operator[](std::size_t i) const { return pulses_[i]; }
  auto begin() const { return pulses_.begin(); }
  auto end() const { return pulses_.end(); }

  /// Concatenation in time: `a + b` runs a, then b.
  friend PulseSequence operator+(const PulseSequence& a, const PulseSequence& b) {
    std::vector<Pulse> out(a.pulses_);
    out.insert(out.end(), b.pulses_.begin(), b.pulses_.end());
    return PulseSequence(std::move(out));
  }
  friend bool operator==(const PulseSequence&, const PulseSequence&) = default;

 private:
  std::vector<Pulse> pulses_;
};

/// The ideal gate R(theta, alpha) a corrected sequence should implement.
struct TargetRotation {
  double theta;
  double alpha;

  TargetRotation(double theta_, double alpha_) : theta(theta_), alpha(wrap_phase(alpha_)) {
    if (!std::isfinite(theta_) || !std::isfinite(alpha_))
      throw DomainError("TargetRotation: theta and alpha must be finite");
    if (theta_ <= 0.0) throw DomainError("TargetRotation: theta must be positive");
  }

  Pulse pulse() const { return Pulse(theta, alpha); }
  Unitary2 ideal() const { return rotation(theta, alpha); }
};

/// Systematic fractional pulse-length error applied to every pulse.
class ErrorModel {
 public:
  explicit ErrorModel(double epsilon = 0.0) : epsilon_(epsilon) {
    if (!std::isfinite(epsilon) || std::abs(epsilon) >= 1.0)
      throw DomainError("ErrorModel: |epsilon| must be below 1");
  }
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

/// Product of R(angle_k (1+eps), phase_k), the last pulse leftmost.
inline Unitary2 compile(const PulseSequence& seq, const ErrorModel& err = ErrorModel{}) {
  const double scale = 1.0 + err.epsilon();
  Unitary2 u;
  for (const Pulse& p : seq) u = rotation(p.angle() * scale, p.phase()) * u;
  return u;
}

/// R(split theta, alpha), then `seq`, then R((1 - split) theta, alpha).
/// Zero-length target fragments at the boundaries are dropped.
inline PulseSequence embed_target(const PulseSequence& seq, const TargetRotation& target,
                                  double split) {
  if (!(split >= 0.0 && split <= 1.0)) throw DomainError("embed_target: split must lie in [0, 1]");
  std::vector<Pulse> out;
  out.reserve(seq.size() + 2);
  if (split > 0.0) out.emplace_back(split * target.theta, target.alpha);
  out.insert(out.end(), seq.begin(), seq.end());
  if (split < 1.0) out.emplace_back((1.0 - split) * target.theta, target.alpha);
  return PulseSequence(std::move(out));
}

inline PulseSequence phase_shift(const PulseSequence& seq, double delta) {
  if (!std::isfinite(delta)) throw DomainError("phase_shift: delta must be finite");
  std::vector<Pulse> out;
  out.reserve(seq.size());
  for (const Pulse& p : seq) out.emplace_back(p.angle(), p.phase() + delta);
  return PulseSequence(std::move(out));
}

inline PulseSequence repeat(const PulseSequence& seq, int n) {
  if (n < 1) throw DomainError("repeat: n must be at least 1");
  std::vector<Pulse> out;
  out.reserve(seq.size() * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.insert(out.end(), seq.begin(), seq.end());
  return PulseSequence(std::move(out));
}

// Text form: one pulse per line, "<angle_rad> <phase_rad>", '#' starts a
// comment line, blank lines are ignored.

inline void write_pulses(std::ostream& out, const PulseSequence& seq) {
  for (const Pulse& p : seq) out << fmt::format("{:.17g} {:.17g}\n", p.angle(), p.phase());
}

inline std::string format_pulses(const PulseSequence& seq) {
  std::ostringstream os;
  write_pulses(os, seq);
  return os.str();
}

inline PulseSequence read_pulses(std::istream& in) {
  std::vector<Pulse> pulses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double angle = 0.0;
    double phase = 0.0;
    std::string rest;
    if (!(ls >> angle >> phase) || (ls >> rest))
      throw DomainError(fmt::format("pulse text line {}: expected '<angle> <phase>'", line_no));
    if (angle < 0.0) throw DomainError(fmt::format("pulse text line {}: negative angle", line_no));
    pulses.emplace_back(angle, phase);
  }
  if (pulses.empty()) throw DomainError("pulse text: no pulses found");
  return PulseSequence(std::move(pulses));
}

inline PulseSequence parse_pulses(const std::string& text) {
  std::istringstream is(text);
  return read_pulses(is);
}

}  // namespace cpseq
