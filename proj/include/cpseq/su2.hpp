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

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cpseq {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Real coefficients of an su(2) element over the Pauli basis: H = x X + y Y + z Z.
struct Su2Vector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  /// Unit axis in the XY plane at angle `phase` from X.
  static Su2Vector axis(double phase) { return {std::cos(phase), std::sin(phase), 0.0}; }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const Su2Vector& o) const { return x * o.x + y * o.y + z * o.z; }
  Su2Vector cross(const Su2Vector& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  Su2Vector& operator+=(const Su2Vector& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Su2Vector& operator-=(const Su2Vector& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Su2Vector& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend Su2Vector operator+(Su2Vector a, const Su2Vector& b) { return a += b; }
  friend Su2Vector operator-(Su2Vector a, const Su2Vector& b) { return a -= b; }
  friend Su2Vector operator-(Su2Vector a) { return a *= -1.0; }
  friend Su2Vector operator*(Su2Vector a, double s) { return a *= s; }
  friend Su2Vector operator*(double s, Su2Vector a) { return a *= s; }
  friend bool operator==(const Su2Vector&, const Su2Vector&) = default;
};

/// General 2x2 complex matrix, row-major. Used for generators, commutators and
/// anything else that is not guaranteed unitary.
class Mat2 {
 public:
  constexpr Mat2() = default;
  constexpr Mat2(cplx a, cplx b, cplx c, cplx d) : m_{a, b, c, d} {}

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }
  /// The Hermitian matrix v.sigma.
  static Mat2 pauli(const Su2Vector& v) {
    return {cplx(v.z, 0.0), cplx(v.x, -v.y), cplx(v.x, v.y), cplx(-v.z, 0.0)};
  }

  constexpr cplx operator()(int row, int col) const { return m_[2 * row + col]; }
  constexpr cplx& operator()(int row, int col) { return m_[2 * row + col]; }
  constexpr const std::array<cplx, 4>& entries() const { return m_; }

  cplx trace() const { return m_[0] + m_[3]; }
  cplx det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  Mat2 adjoint() const {
    return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
  }

  Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 4; ++i) m_[i] += o.m_[i];
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    for (int i = 0; i < 4; ++i) m_[i] -= o.m_[i];
    return *this;
  }
  Mat2& operator*=(cplx s) {
    for (auto& e : m_) e *= s;
    return *this;
  }
  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
  friend Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
  friend Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m_[0] * b.m_[0] + a.m_[1] * b.m_[2], a.m_[0] * b.m_[1] + a.m_[1] * b.m_[3],
            a.m_[2] * b.m_[0] + a.m_[3] * b.m_[2], a.m_[2] * b.m_[1] + a.m_[3] * b.m_[3]};
  }

  /// Largest entrywise modulus of the difference.
  friend double max_abs_diff(const Mat2& a, const Mat2& b) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a.m_[i] - b.m_[i]));
    return d;
  }

 private:
  std::array<cplx, 4> m_{};
};

/// Complex coefficients of M = c0 I + cx X + cy Y + cz Z.
struct PauliCoefficients {
  cplx c0, cx, cy, cz;
};

inline PauliCoefficients pauli_coefficients(const Mat2& m) {
  const cplx i(0.0, 1.0);
  return {0.5 * (m(0, 0) + m(1, 1)), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * i * (m(0, 1) - m(1, 0)),
          0.5 * (m(0, 0) - m(1, 1))};
}

/// Real part of the Hermitian content of an anti-Hermitian traceless matrix
/// M = -i v.sigma, returning v.
inline Su2Vector anti_hermitian_vector(const Mat2& m) {
  const auto c = pauli_coefficients(m);
  return {-c.cx.imag(), -c.cy.imag(), -c.cz.imag()};
}

/// Hermitian traceless M = v.sigma, returning v.
inline Su2Vector hermitian_vector(const Mat2& m) {
  const auto c = pauli_coefficients(m);
  return {c.cx.real(), c.cy.real(), c.cz.real()};
}

/// A 2x2 unitary. Only unitary-preserving operations are exposed; the global
/// phase is kept as computed.
class Unitary2 {
 public:
  Unitary2() : m_(Mat2::identity()) {}

  static Unitary2 identity() { return Unitary2(); }
  /// Wraps a matrix the caller guarantees to be unitary.
  static Unitary2 from_matrix_unchecked(const Mat2& m) { return Unitary2(m); }

  const Mat2& matrix() const { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }
  cplx trace() const { return m_.trace(); }
  cplx det() const { return m_.det(); }

  Unitary2 adjoint() const { return Unitary2(m_.adjoint()); }

  /// Largest entrywise deviation of U U^dagger from the identity.
  double unitarity_defect() const { return max_abs_diff(m_ * m_.adjoint(), Mat2::identity()); }

  friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) { return Unitary2(a.m_ * b.m_); }
  Unitary2& operator*=(const Unitary2& o) {
    m_ = m_ * o.m_;
    return *this;
  }
  friend double max_abs_diff(const Unitary2& a, const Unitary2& b) {
    return max_abs_diff(a.m_, b.m_);
  }

 private:
  explicit Unitary2(const Mat2& m) : m_(m) {}
  Mat2 m_;
};

inline Unitary2 multiply(const Unitary2& u, const Unitary2& v) { return u * v; }
inline Unitary2 adjoint(const Unitary2& u) { return u.adjoint(); }

/// exp(-i scale H) for H = h.sigma, evaluated in closed form.
inline Unitary2 exp_su2(const Su2Vector& h, double scale) {
  if (!h.is_finite() || !std::isfinite(scale)) throw DomainError("exp_su2: non-finite input");
  const double n = h.norm();
  if (n == 0.0) return Unitary2::identity();
  const double angle = scale * n;
  const double c = std::cos(angle);
  const double s = std::sin(angle) / n;
  // cos(a) I - i sin(a) H/|h|
  return Unitary2::from_matrix_unchecked(Mat2{cplx(c, -s * h.z), cplx(-s * h.y, -s * h.x),
                                              cplx(s * h.y, -s * h.x), cplx(c, s * h.z)});
}

/// R(theta, alpha) = exp(-i theta/2 (X cos alpha + Y sin alpha)).
inline Unitary2 rotation(double theta, double alpha) {
  if (!std::isfinite(theta) || !std::isfinite(alpha))
    throw DomainError("rotation: angle and phase must be finite");
  return exp_su2(Su2Vector::axis(alpha), 0.5 * theta);
}

/// Reduces an angle to [0, 2 pi).
inline double wrap_phase(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed distance between two phases, in (-pi, pi].
inline double phase_distance(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  return d;
}

}  // namespace cpseq
