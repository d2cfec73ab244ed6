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
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "cpseq/analysis.hpp"
#include "cpseq/pulse.hpp"
#include "cpseq/su2.hpp"

namespace cpseq {

/// No phases satisfy the design constraints for the requested target.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double best_residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

enum class Family { Wn, Wm, FivePulse };

struct FamilySpec {
  Family kind = Family::Wn;
  int n = 1;
  int m = 1;
  int p = 1;
  int q = 1;
  int r = 1;

  static FamilySpec wn(int n) { return {Family::Wn, n, 1, 1, 1, 1}; }
  static FamilySpec wm(int m) { return {Family::Wm, 1, m, 1, 1, 1}; }
  static FamilySpec five_pulse(int p, int q, int r) { return {Family::FivePulse, 1, 1, p, q, r}; }

  void validate() const {
    switch (kind) {
      case Family::Wn:
        if (n < 1) throw DomainError("Wn family: n must be at least 1");
        break;
      case Family::Wm:
        if (m < 1) throw DomainError("Wm family: m must be at least 1");
        break;
      case Family::FivePulse:
        if (p < 1 || q < 1 || r < 1) throw DomainError("five-pulse family: p, q, r must be positive");
        if ((p + q + r) % 2 != 0) throw DomainError("five-pulse family: p + q + r must be even");
        break;
    }
  }

  std::string label() const {
    switch (kind) {
      case Family::Wn: return n == 1 ? "BB1" : fmt::format("W{}x", n);
      case Family::Wm: return fmt::format("W{}", m);
      case Family::FivePulse: return fmt::format("W{}{}{}", p, q, r);
    }
    return {};
  }
};

inline constexpr double kDerivativeTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

struct DesignResult {
  FamilySpec family;
  PulseSequence sequence;  // corrector only
  std::vector<double> phases;
  std::vector<double> mirror_phases;  // the other arccos branch, when one exists
  double derivative_residual = 0.0;
  double identity_residual = 0.0;
  bool closed_form = false;
  int branch = 0;  // +1 / -1 for closed-form arccos branches, 0 for root-finder output

  bool valid() const {
    return derivative_residual < kDerivativeTolerance && identity_residual < kIdentityTolerance;
  }
};

/// Vector s with  sum_k angle_k V_k^dagger H_k V_k = s.sigma, where H_k is the
/// axis of pulse k and V_k the ideal product of the pulses before it. The
/// error derivative of the compiled sequence at eps = 0 is U (-i/2) s.sigma.
inline Su2Vector derivative_vector(const PulseSequence& full) {
  Mat2 acc = Mat2::zero();
  Unitary2 before;
  for (const Pulse& p : full) {
    const Mat2& v = before.matrix();
    acc += cplx(p.angle()) * (v.adjoint() * Mat2::pauli(p.axis()) * v);
    before = rotation(p.angle(), p.phase()) * before;
  }
  return hermitian_vector(acc);
}

/// Norm of the first-order error term for the target followed by `corrector`.
inline double derivative_residual(const PulseSequence& corrector, const TargetRotation& target) {
  return derivative_vector(embed_target(corrector, target, 1.0)).norm();
}

/// Central-difference estimate of derivative_vector from products compiled at
/// eps = +h and -h.
inline Su2Vector derivative_vector_central_difference(const PulseSequence& full, double h) {
  const Mat2 u0 = compile(full).matrix();
  const Mat2 d = (compile(full, ErrorModel(h)).matrix() - compile(full, ErrorModel(-h)).matrix()) *
                 cplx(0.5 / h);
  return 2.0 * anti_hermitian_vector(u0.adjoint() * d);
}

/// 1 - trace fidelity of the error-free corrector against the identity.
inline double identity_residual(const PulseSequence& seq) {
  return infidelity(compile(seq), Unitary2::identity());
}

/// R(first, phi1) R(second, phi2) R(first, phi1) in time order.
inline PulseSequence symmetric_three_pulse(double first, double second, double phi1, double phi2) {
  return PulseSequence{Pulse(first, phi1), Pulse(second, phi2), Pulse(first, phi1)};
}

/// The W_pqr corrector with angles (p pi, q pi, 2 r pi, q pi, p pi).
inline PulseSequence five_pulse_sequence(int p, int q, int r, double phi1, double phi2, double phi3) {
  return PulseSequence{Pulse(p * kPi, phi1), Pulse(q * kPi, phi2), Pulse(2.0 * r * kPi, phi3),
                       Pulse(q * kPi, phi2), Pulse(p * kPi, phi1)};
}

namespace detail {

inline DesignResult finish(FamilySpec family, PulseSequence seq, std::vector<double> phases,
                           std::vector<double> mirror, const TargetRotation& target, bool closed,
                           int branch) {
  for (double& ph : phases) ph = wrap_phase(ph);
  for (double& ph : mirror) ph = wrap_phase(ph);
  DesignResult res{family, std::move(seq), std::move(phases), std::move(mirror), 0.0, 0.0, closed, branch};
  res.derivative_residual = derivative_residual(res.sequence, target);
  res.identity_residual = identity_residual(res.sequence);
  return res;
}

inline void require_valid(const DesignResult& res) {
  if (!res.valid())
    throw InfeasibleError(fmt::format("{}: design failed validation (derivative residual {:.3g}, "
                                      "identity residual {:.3g})",
                                      res.family.label(), res.derivative_residual, res.identity_residual),
                          res.derivative_residual);
}

/// arccos of -theta / (4 k pi), the common phase offset of the three-pulse families.
inline double three_pulse_offset(double theta, int k, const char* what) {
  const double c = -theta / (4.0 * k * kPi);
  if (c < -1.0 - 1e-15) throw InfeasibleError(fmt::format("{}: theta/(4*{}*pi) = {:.6g} exceeds 1", what, k, -c));
  return std::acos(std::max(-1.0, c));
}

template <std::size_t M>
using Residual = std::array<double, M>;

template <std::size_t M>
double squared_norm(const Residual<M>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

/// Levenberg-Marquardt over two unknowns with a central-difference Jacobian.
template <std::size_t M, class Fn>
std::pair<std::array<double, 2>, double> levenberg_marquardt(Fn&& fn, std::array<double, 2> x,
                                                             int max_iter = 60, double tol = 1e-28) {
  constexpr double kStep = 1e-7;
  Residual<M> r = fn(x);
  double cost = squared_norm(r);
  double lambda = 1e-3;
  for (int it = 0; it < max_iter && cost > tol; ++it) {
    std::array<Residual<M>, 2> jac{};
    for (int j = 0; j < 2; ++j) {
      auto xp = x, xm = x;
      xp[j] += kStep;
      xm[j] -= kStep;
      const auto rp = fn(xp);
      const auto rm = fn(xm);
      for (std::size_t i = 0; i < M; ++i) jac[j][i] = (rp[i] - rm[i]) / (2.0 * kStep);
    }
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < M; ++i) {
      a00 += jac[0][i] * jac[0][i];
      a01 += jac[0][i] * jac[1][i];
      a11 += jac[1][i] * jac[1][i];
      g0 += jac[0][i] * r[i];
      g1 += jac[1][i] * r[i];
    }
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      const double d00 = a00 * (1.0 + lambda) + 1e-300;
      const double d11 = a11 * (1.0 + lambda) + 1e-300;
      const double det = d00 * d11 - a01 * a01;
      if (!(std::abs(det) > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const std::array<double, 2> trial{x[0] - (d11 * g0 - a01 * g1) / det,
                                        x[1] - (d00 * g1 - a01 * g0) / det};
      const auto rt = fn(trial);
      const double ct = squared_norm(rt);
      if (ct < cost) {
        x = trial;
        r = rt;
        cost = ct;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  return {x, std::sqrt(cost)};
}

inline bool same_phases(std::span<const double> a, std::span<const double> b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(phase_distance(a[i], b[i])) > tol) return false;
  return true;
}

}  // namespace detail

/// BB1 (n = 1) and its n-copy generalisation: the corrector
/// R(pi, phi1) R(2 pi, phi2) R(pi, phi1) repeated n times, with
/// cos(phi1 - alpha) = -theta / (4 n pi) and phi2 = 3 phi1 - 2 alpha.
inline DesignResult design_wn(int n, const TargetRotation& target) {
  const FamilySpec fam = FamilySpec::wn(n);
  fam.validate();
  const double offset = detail::three_pulse_offset(target.theta, n, "Wn");
  const double a = target.alpha;
  const double phi1 = a + offset;
  const double phi2 = 3.0 * phi1 - 2.0 * a;
  const double mphi1 = a - offset;
  auto res = detail::finish(fam, repeat(symmetric_three_pulse(kPi, kTwoPi, phi1, phi2), n), {phi1, phi2},
                            {mphi1, 3.0 * mphi1 - 2.0 * a}, target, true, +1);
  detail::require_valid(res);
  return res;
}

/// R(m pi, phi1) R(2 m pi, phi2) R(m pi, phi1) with cos(phi1 - alpha) = -theta/(4 m pi);
/// phi2 = 3 phi1 - 2 alpha for odd m and phi2 = 2 alpha - phi1 for even m.
inline DesignResult design_wm(int m, const TargetRotation& target) {
  const FamilySpec fam = FamilySpec::wm(m);
  fam.validate();
  const double offset = detail::three_pulse_offset(target.theta, m, "Wm");
  const double a = target.alpha;
  auto second = [&](double phi1) { return m % 2 == 1 ? 3.0 * phi1 - 2.0 * a : 2.0 * a - phi1; };
  const double phi1 = a + offset;
  const double mphi1 = a - offset;
  auto res = detail::finish(fam, symmetric_three_pulse(m * kPi, 2.0 * m * kPi, phi1, second(phi1)),
                            {phi1, second(phi1)}, {mphi1, second(mphi1)}, target, true, +1);
  detail::require_valid(res);
  return res;
}

struct FivePulseOptions {
  int grid = 24;                        // pins for phi1 and seeds per axis for (phi2, phi3)
  double dedup_tolerance = 1e-6;        // radians
  double acceptance = 1e-10;            // residual the root-finder must reach
};

/// All W_pqr correctors R(p pi, phi1) R(q pi, phi2) R(2 r pi, phi3) R(q pi, phi2) R(p pi, phi1)
/// cancelling the first-order error of the target.
///
/// The first-order condition gives two equations in three phases, so solutions
/// form curves. The solver pins phi1 on a `grid`-point lattice and runs
/// Levenberg-Marquardt for (phi2, phi3) from a grid x grid seed lattice; known
/// closed forms for (1,2,1) and (2,2,2) are added with both arccos branches.
/// Work is done for a target on the X axis and shifted by alpha afterwards.
/// Results are deduplicated modulo 2 pi and sorted by (phi1, phi2, phi3).
inline std::vector<DesignResult> design_five_pulse(int p, int q, int r, const TargetRotation& target,
                                                   const FivePulseOptions& opt = {}) {
  const FamilySpec fam = FamilySpec::five_pulse(p, q, r);
  fam.validate();
  const TargetRotation base(target.theta, 0.0);
  const PulseSequence base_target{base.pulse()};

  std::vector<std::array<double, 3>> found;
  std::vector<std::pair<bool, int>> origin;  // closed form?, branch
  auto add = [&](std::array<double, 3> ph, bool closed, int branch) {
    for (double& v : ph) v = wrap_phase(v);
    for (const auto& f : found)
      if (detail::same_phases(f, ph, opt.dedup_tolerance)) return;
    found.push_back(ph);
    origin.emplace_back(closed, branch);
  };

  // Closed forms are stated for alpha = pi; subtract pi to reach the X-axis frame.
  const double theta = target.theta;
  if (p == 1 && q == 2 && r == 1) {
    const double c = (theta - 4.0 * kPi) / (4.0 * kPi);
    if (std::abs(c) <= 1.0)
      for (int b : {+1, -1}) {
        const double phi1 = b * std::acos(c);
        add({phi1 - kPi, 2.0 * phi1 - kPi, 3.0 * phi1 - kPi}, true, b);
      }
  } else if (p == 2 && q == 2 && r == 2) {
    const double c = (theta - 4.0 * kPi) / (8.0 * kPi);
    if (std::abs(c) <= 1.0)
      for (int b : {+1, -1}) {
        const double phi2 = b * std::acos(c);
        add({-kPi, phi2 - kPi, -phi2 - kPi}, true, b);
      }
  }

  double best = std::numeric_limits<double>::infinity();
  const double step = kTwoPi / opt.grid;
  for (int k = 0; k < opt.grid; ++k) {
    const double phi1 = k * step;
    auto residual = [&](const std::array<double, 2>& x) {
      const Su2Vector d = derivative_vector(base_target + five_pulse_sequence(p, q, r, phi1, x[0], x[1]));
      return detail::Residual<2>{d.x, d.y};
    };
    for (int i = 0; i < opt.grid; ++i)
      for (int j = 0; j < opt.grid; ++j) {
        const auto [x, res] = detail::levenberg_marquardt<2>(residual, {i * step, j * step});
        best = std::min(best, res);
        if (res < opt.acceptance) add({phi1, x[0], x[1]}, false, 0);
      }
  }

  std::vector<DesignResult> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    const auto& ph = found[i];
    std::vector<double> phases{ph[0] + target.alpha, ph[1] + target.alpha, ph[2] + target.alpha};
    auto res = detail::finish(fam, five_pulse_sequence(p, q, r, phases[0], phases[1], phases[2]), phases,
                              {}, target, origin[i].first, origin[i].second);
    if (res.valid()) out.push_back(std::move(res));
  }
  if (out.empty())
    throw InfeasibleError(fmt::format("{}: no phases satisfy the first-order condition for theta={:.6g} "
                                      "(best residual {:.3g})",
                                      fam.label(), target.theta, best),
                          best);
  std::sort(out.begin(), out.end(), [](const DesignResult& a, const DesignResult& b) {
    return std::lexicographical_compare(a.phases.begin(), a.phases.end(), b.phases.begin(), b.phases.end());
  });
  return out;
}

/// The closed-form solution on the given arccos branch, if the family has one.
inline std::optional<DesignResult> closed_form_solution(const std::vector<DesignResult>& results, int branch = +1) {
  for (const auto& r : results)
    if (r.closed_form && r.branch == branch) return r;
  return std::nullopt;
}

/// Designs for a family; three-pulse families yield a single result.
inline std::vector<DesignResult> design_all(const FamilySpec& fam, const TargetRotation& target) {
  switch (fam.kind) {
    case Family::Wn: return {design_wn(fam.n, target)};
    case Family::Wm: return {design_wm(fam.m, target)};
    case Family::FivePulse: return design_five_pulse(fam.p, fam.q, fam.r, target);
  }
  return {};
}

/// The preferred single design: the closed form (+ branch) when one exists,
/// otherwise the first root-finder solution.
inline DesignResult design_family(const FamilySpec& fam, const TargetRotation& target) {
  auto all = design_all(fam, target);
  if (auto cf = closed_form_solution(all)) return *cf;
  return all.front();
}

struct ThreePulseScanPoint {
  double gamma = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double derivative_residual = 0.0;
  double identity_residual = 0.0;

  bool admits_solution() const {
    return derivative_residual < kDerivativeTolerance && identity_residual < kIdentityTolerance;
  }
};

/// Best phases for the general symmetric corrector with angles
/// (gamma, 2 (2 m pi - gamma), gamma).
///
/// Minimises the joint residual of the first-order condition and of the
/// identity requirement (the Pauli content of the error-free corrector) from
/// a seeds x seeds lattice of starting phases; reports both parts at the best
/// point found.
inline ThreePulseScanPoint three_pulse_scan_point(double gamma, const TargetRotation& target, int m = 1,
                                                  int seeds = 12) {
  const double eta = 2.0 * (2.0 * m * kPi - gamma);
  if (!(gamma > 0.0) || !(eta >= 0.0)) throw DomainError("three_pulse_scan_point: need 0 < gamma <= 2 m pi");
  const PulseSequence tgt{target.pulse()};
  auto residual = [&](const std::array<double, 2>& x) {
    const PulseSequence w = symmetric_three_pulse(gamma, eta, x[0], x[1]);
    const Su2Vector d = derivative_vector(tgt + w);
    const auto c = pauli_coefficients(compile(w).matrix());
    return detail::Residual<9>{d.x,         d.y,         d.z,         c.cx.real(), c.cx.imag(),
                               c.cy.real(), c.cy.imag(), c.cz.real(), c.cz.imag()};
  };
  ThreePulseScanPoint best;
  best.gamma = gamma;
  double best_cost = std::numeric_limits<double>::infinity();
  const double step = kTwoPi / seeds;
  for (int i = 0; i < seeds; ++i)
    for (int j = 0; j < seeds; ++j) {
      const auto [x, cost] = detail::levenberg_marquardt<9>(residual, {i * step, j * step});
      if (cost < best_cost) {
        best_cost = cost;
        best.phi1 = wrap_phase(x[0]);
        best.phi2 = wrap_phase(x[1]);
      }
    }
  const PulseSequence w = symmetric_three_pulse(gamma, eta, best.phi1, best.phi2);
  best.derivative_residual = derivative_residual(w, target);
  best.identity_residual = identity_residual(w);
  return best;
}

}  // namespace cpseq
