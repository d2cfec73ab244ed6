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
#include <stdexcept>
#include <string>
#include <vector>

#include "cpseq/pulse.hpp"
#include "cpseq/su2.hpp"

namespace cpseq {

// Lie-algebra elements are stored as the real vector v of v.sigma; the element
// itself is -i v.sigma. With that convention the bracket of two elements is
// again such an element, with vector 2 (a x b), and exp(element) = exp_su2(v, 1).

inline Su2Vector commutator(const Su2Vector& a, const Su2Vector& b) { return 2.0 * a.cross(b); }

/// exp(-i v.sigma).
inline Unitary2 exp_element(const Su2Vector& v) { return exp_su2(v, 1.0); }

class UnsupportedOrderError : public std::invalid_argument {
 public:
  explicit UnsupportedOrderError(const std::string& what) : std::invalid_argument(what) {}
};

/// Polynomial in eps with su(2) coefficients, truncated at max_order.
class Su2Series {
 public:
  explicit Su2Series(int max_order) : coeffs_(static_cast<std::size_t>(check(max_order)) + 1) {}

  static Su2Series constant(const Su2Vector& v, int max_order) {
    Su2Series s(max_order);
    s.coeffs_[0] = v;
    return s;
  }

  int max_order() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// Zero above max_order.
  Su2Vector operator[](int k) const {
    return k >= 0 && k <= max_order() ? coeffs_[static_cast<std::size_t>(k)] : Su2Vector{};
  }
  void set(int k, const Su2Vector& v) {
    if (k < 0 || k > max_order()) throw DomainError("Su2Series::set: power out of range");
    coeffs_[static_cast<std::size_t>(k)] = v;
  }

  /// Same coefficients, truncated or zero-padded to a new order.
  Su2Series truncated(int order) const {
    Su2Series s(order);
    for (int k = 0; k <= order; ++k) s.coeffs_[static_cast<std::size_t>(k)] = (*this)[k];
    return s;
  }

  /// Multiplies by eps^k, dropping what falls beyond max_order.
  Su2Series shifted_up(int k) const {
    Su2Series s(max_order());
    for (int j = 0; j + k <= max_order(); ++j) s.coeffs_[static_cast<std::size_t>(j + k)] = (*this)[j];
    return s;
  }

  /// Divides by eps; the constant term must vanish. The result is known one
  /// order lower.
  Su2Series divided_by_eps() const {
    if (coeffs_[0].norm() != 0.0) throw DomainError("Su2Series::divided_by_eps: nonzero constant term");
    Su2Series s(std::max(0, max_order() - 1));
    for (int j = 1; j <= max_order(); ++j) s.coeffs_[static_cast<std::size_t>(j - 1)] = coeffs_[static_cast<std::size_t>(j)];
    return s;
  }

  Su2Vector evaluate(double eps) const {
    Su2Vector out;
    for (int k = max_order(); k >= 0; --k) out = out * eps + (*this)[k];
    return out;
  }

  friend Su2Series operator+(const Su2Series& a, const Su2Series& b) {
    Su2Series s(std::min(a.max_order(), b.max_order()));
    for (int k = 0; k <= s.max_order(); ++k) s.coeffs_[static_cast<std::size_t>(k)] = a[k] + b[k];
    return s;
  }
  friend Su2Series operator-(const Su2Series& a, const Su2Series& b) { return a + b * -1.0; }
  friend Su2Series operator*(Su2Series a, double c) {
    for (auto& v : a.coeffs_) v *= c;
    return a;
  }
  friend Su2Series operator*(double c, Su2Series a) { return std::move(a) * c; }

 private:
  static int check(int max_order) {
    if (max_order < 0) throw DomainError("Su2Series: max_order must be non-negative");
    return max_order;
  }
  std::vector<Su2Vector> coeffs_;
};

/// Cauchy product of brackets, truncated at the smaller order.
inline Su2Series commutator(const Su2Series& a, const Su2Series& b) {
  Su2Series s(std::min(a.max_order(), b.max_order()));
  for (int k = 0; k <= s.max_order(); ++k) {
    Su2Vector acc;
    for (int j = 0; j <= k; ++j) acc += commutator(a[j], b[k - j]);
    s.set(k, acc);
  }
  return s;
}

/// Highest eps order for which the t^3-truncated symmetric BCH is exact.
inline constexpr int kMaxSbchOrder = 4;

/// log(e^{tR/2} e^{tS} e^{tR/2}) = t(R+S) - t^3/24 [R+2S,[R,S]] + O(t^5), with
/// t = t_scale * eps, expanded to eps^order.
inline Su2Series sbch_truncated(double t_scale, const Su2Series& r, const Su2Series& s, int order) {
  if (order > kMaxSbchOrder)
    throw UnsupportedOrderError("sbch_truncated: terms beyond eps^4 need the t^5 correction, which is not implemented");
  if (order < 1) throw DomainError("sbch_truncated: order must be at least 1");
  const Su2Series rr = r.truncated(order);
  const Su2Series ss = s.truncated(order);
  const Su2Series first = (rr + ss).shifted_up(1) * t_scale;
  const Su2Series third = commutator(rr + 2.0 * ss, commutator(rr, ss)).shifted_up(3) *
                          (-t_scale * t_scale * t_scale / 24.0);
  return first + third;
}

/// Exponent P(eps) of the target-plus-corrector product, in a frame where the
/// fidelity is |Tr exp(P)|/2.
///
/// The corrector must be n copies of a symmetric (m pi, 2 k pi, m pi) block.
/// With Q = theta C, R = m pi A and S = k pi (A^m B A^m):
///   P = sbch(eps/2; Q, (2n/eps) sbch(eps; R, S)),
/// known through eps^3.
inline Su2Series p_epsilon(const PulseSequence& corrector, const TargetRotation& target) {
  constexpr double kTol = 1e-9;
  const std::size_t len = corrector.size();
  if (len % 3 != 0) throw DomainError("p_epsilon: corrector must be copies of a three-pulse block");
  const Pulse& a = corrector[0];
  const Pulse& b = corrector[1];
  for (std::size_t i = 0; i < len; i += 3)
    if (!(corrector[i] == a && corrector[i + 1] == b && corrector[i + 2] == a))
      throw DomainError("p_epsilon: corrector must be identical symmetric three-pulse blocks");
  const double m = std::round(a.angle() / kPi);
  const double k = std::round(b.angle() / kTwoPi);
  if (m < 1 || k < 1 || std::abs(a.angle() - m * kPi) > kTol || std::abs(b.angle() - k * kTwoPi) > kTol)
    throw DomainError("p_epsilon: block angles must be (m pi, 2 k pi, m pi)");
  const int n = static_cast<int>(len / 3);

  // A^m B A^m is B for even m and the reflection of B through A for odd m.
  const double reflected = static_cast<int>(m) % 2 == 1 ? 2.0 * a.phase() - b.phase() : b.phase();
  const Su2Series q = Su2Series::constant(target.theta * Su2Vector::axis(target.alpha), 4);
  const Su2Series rs = Su2Series::constant(m * kPi * a.axis(), 4);
  const Su2Series ss = Su2Series::constant(k * kPi * Su2Vector::axis(reflected), 4);

  const Su2Series inner = sbch_truncated(1.0, rs, ss, 4);
  const Su2Series y = (inner * (2.0 * n)).divided_by_eps();  // through eps^3
  return sbch_truncated(0.5, q, y, 3);
}

/// C in 1 - F = C eps^6 from the eps^3 term of P, valid when the eps^1 term vanishes.
inline double series_sixth_order_coefficient(const Su2Series& p) { return 0.5 * p[3].dot(p[3]); }

/// C(Delta) = (pi^6/144) [5 + 2 cos D - 5 cos 2D - 2 cos 3D] for the single-block
/// (pi, 2 pi, pi) corrector with Delta = phi2 - phi1.
inline double analytic_c(double delta) {
  const double pi6 = std::pow(kPi, 6);
  return pi6 / 144.0 *
         (5.0 + 2.0 * std::cos(delta) - 5.0 * std::cos(2.0 * delta) - 2.0 * std::cos(3.0 * delta));
}

}  // namespace cpseq
