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

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpseq/pulse.hpp"
#include "cpseq/su2.hpp"

namespace cpseq {

/// |Tr(V U^dagger)| / Tr(U U^dagger). Insensitive to the global phase of either argument.
inline double fidelity(const Unitary2& v, const Unitary2& u) {
  const Mat2 ud = u.matrix().adjoint();
  return std::abs((v.matrix() * ud).trace()) / (u.matrix() * ud).trace().real();
}

/// 1 - fidelity(v, u), evaluated without cancellation.
///
/// For unitary M = V U^dagger = e^{i chi}(c I - i s.sigma) with c^2 + |s|^2 = 1,
/// 1 - |c| = |s|^2 / (1 + |c|). The Pauli components of M carry |s| to full
/// relative precision, so values far below machine epsilon stay meaningful.
inline double infidelity(const Unitary2& v, const Unitary2& u) {
  const auto c = pauli_coefficients(v.matrix() * u.matrix().adjoint());
  const double s2 = std::norm(c.cx) + std::norm(c.cy) + std::norm(c.cz);
  return s2 / (1.0 + std::abs(c.c0));
}

struct SweepRow {
  double epsilon;
  double fidelity;
  double infidelity;
};

struct SweepTable {
  std::string label;
  std::vector<SweepRow> rows;
};

/// Raised by fit_scaling when the window reaches the numerical floor.
class FitWindowError : public std::runtime_error {
 public:
  explicit FitWindowError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by crossover when the composite sequence is not better than the bare
/// pulse at small error.
class NotSuperiorError : public std::runtime_error {
 public:
  explicit NotSuperiorError(const std::string& what) : std::runtime_error(what) {}
};

struct FitReport {
  double order = 0.0;             // slope of log(1-F) against log(eps)
  double coefficient = 0.0;       // leading coefficient C of 1-F = C eps^k + D eps^(k+2)
  double r_squared = 0.0;         // of the log-log line
  double eps_min = 0.0;
  double eps_max = 0.0;
  int leading_power = 0;          // k, the rounded order
  double line_coefficient = 0.0;  // exp(intercept) of the log-log line
  double next_coefficient = 0.0;  // D
};

inline constexpr double kFitWindowMin = 1e-3;
inline const double kFitWindowMax = std::pow(10.0, -1.5);
inline constexpr int kFitWindowPoints = 40;
/// Infidelities at or below this are too close to round-off to fit.
inline constexpr double kInfidelityFloor = 1e-24;

/// `count` logarithmically spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw DomainError("log_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// `count` evenly spaced points from lo to hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, int count) {
  if (!(hi > lo) || count < 2) throw DomainError("linear_grid: need lo < hi, count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  g.back() = hi;
  return g;
}

inline std::vector<double> default_fit_grid() {
  return log_grid(kFitWindowMin, kFitWindowMax, kFitWindowPoints);
}

/// Fidelity of compile(full, eps) against `ideal` at every grid point.
inline SweepTable sweep_sequence(const PulseSequence& full, const Unitary2& ideal,
                                 std::span<const double> eps_grid, std::string label = {}) {
  if (eps_grid.empty()) throw DomainError("sweep: empty epsilon grid");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] > eps_grid[i - 1])) throw DomainError("sweep: epsilon grid must be strictly increasing");
  SweepTable t{std::move(label), {}};
  t.rows.reserve(eps_grid.size());
  for (double e : eps_grid) {
    const Unitary2 v = compile(full, ErrorModel(e));
    t.rows.push_back({e, fidelity(v, ideal), infidelity(v, ideal)});
  }
  return t;
}

/// Target pulse followed by the corrector, compared with the ideal target.
inline SweepTable sweep(const PulseSequence& corrector, const TargetRotation& target,
                        std::span<const double> eps_grid, std::string label = {}) {
  return sweep_sequence(embed_target(corrector, target, 1.0), target.ideal(), eps_grid,
                        std::move(label));
}

/// The bare error-prone target pulse.
inline SweepTable sweep_plain(const TargetRotation& target, std::span<const double> eps_grid,
                              std::string label = "plain") {
  return sweep_sequence(PulseSequence{target.pulse()}, target.ideal(), eps_grid, std::move(label));
}

namespace detail {

/// Weighted least squares for 1-F = C eps^k + D eps^(k+2), with weights 1/y so
/// every point counts in relative terms. Returns {C, D}.
inline std::pair<double, double> fit_even_pair(std::span<const SweepRow> rows, int k, double eps_ref) {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (const SweepRow& row : rows) {
    const double a1 = std::pow(row.epsilon, k) / row.infidelity;
    const double a2 = a1 * (row.epsilon / eps_ref) * (row.epsilon / eps_ref);
    s11 += a1 * a1;
    s12 += a1 * a2;
    s22 += a2 * a2;
    b1 += a1;
    b2 += a2;
  }
  const double det = s11 * s22 - s12 * s12;
  const double c = (b1 * s22 - b2 * s12) / det;
  const double d = (s11 * b2 - s12 * b1) / det;
  return {c, d / (eps_ref * eps_ref)};
}

}  // namespace detail

/// Extracts the error order and leading coefficient from a sweep over a
/// small-epsilon window.
///
/// The order is the slope of the least-squares line through (log eps, log(1-F)).
/// Because 1-F is even in eps, the coefficient is then taken from a two-term
/// fit C eps^k + D eps^(k+2) with k the rounded slope; this removes the
/// next-order bias that the bare intercept carries at the top of the window.
inline FitReport fit_scaling(const SweepTable& table) {
  const auto& rows = table.rows;
  if (rows.size() < 3) throw DomainError("fit_scaling: need at least three rows");
  for (const SweepRow& row : rows) {
    if (!(row.epsilon > 0.0)) throw DomainError("fit_scaling: epsilons must be positive");
    if (!(row.infidelity > kInfidelityFloor))
      throw FitWindowError(
          "fit_scaling: infidelity at eps=" + std::to_string(row.epsilon) +
          " is at the numerical floor; raise the lower end of the window");
  }
  const double n = static_cast<double>(rows.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const SweepRow& row : rows) {
    const double x = std::log(row.epsilon);
    const double y = std::log(row.infidelity);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const double ymean = sy / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const SweepRow& row : rows) {
    const double x = std::log(row.epsilon);
    const double y = std::log(row.infidelity);
    ss_res += (y - (intercept + slope * x)) * (y - (intercept + slope * x));
    ss_tot += (y - ymean) * (y - ymean);
  }

  FitReport rep;
  rep.order = slope;
  rep.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
  rep.eps_min = rows.front().epsilon;
  rep.eps_max = rows.back().epsilon;
  rep.line_coefficient = std::exp(intercept);
  rep.leading_power = std::max(1, static_cast<int>(std::lround(slope)));
  const auto [c, d] = detail::fit_even_pair(rows, rep.leading_power, rep.eps_max);
  rep.coefficient = c;
  rep.next_coefficient = d;
  return rep;
}

/// Sweep on the default window, then fit.
inline FitReport fit_sequence(const PulseSequence& corrector, const TargetRotation& target) {
  const auto grid = default_fit_grid();
  return fit_scaling(sweep(corrector, target, grid));
}

inline FitReport fit_plain(const TargetRotation& target) {
  const auto grid = default_fit_grid();
  return fit_scaling(sweep_plain(target, grid));
}

/// Smallest eps > 0 at which the corrected gate is no better than the bare
/// error-prone pulse (same target, same eps). Returns +infinity when the
/// composite stays ahead on all of (0, 0.99].
inline double crossover(const PulseSequence& corrector, const TargetRotation& target) {
  const PulseSequence full = embed_target(corrector, target, 1.0);
  const PulseSequence bare{target.pulse()};
  const Unitary2 ideal = target.ideal();
  // > 0 while the composite is better
  auto margin = [&](double e) {
    const ErrorModel err(e);
    return infidelity(compile(bare, err), ideal) - infidelity(compile(full, err), ideal);
  };
  constexpr double kStart = 0.01;
  constexpr double kStep = 0.005;
  constexpr double kStop = 0.99;
  if (!(margin(kStart) > 0.0))
    throw NotSuperiorError("crossover: sequence is not better than the bare pulse at eps=0.01");
  double lo = kStart;
  for (int i = 1;; ++i) {
    const double e = std::min(kStart + i * kStep, kStop);
    if (!(margin(e) > 0.0)) {
      double hi = e;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    if (e >= kStop) break;
    lo = e;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace cpseq
