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

#include "cpseq/bch.hpp"

#include <cmath>

#include "cpseq/analysis.hpp"
#include "cpseq/design.hpp"
#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace cpseq;

namespace {

constexpr double kTol = 1e-12;

/// The element -i v.sigma as a matrix.
Mat2 element(const Su2Vector& v) { return Mat2::pauli(v) * cplx(0.0, -1.0); }

Mat2 matrix_commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

void expect_vec_near(const Su2Vector& a, const Su2Vector& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

struct Bb1Generators {
  Su2Vector r, s;
};

Bb1Generators bb1_generators(double phi1, double phi2) {
  return {kPi * Su2Vector::axis(phi1), kPi * Su2Vector::axis(2 * phi1 - phi2)};
}

}  // namespace

TEST(Commutator, Examples) {
  const Su2Vector x{1, 0, 0}, y{0, 1, 0};
  expect_vec_near(commutator(x, x), {}, kTol);
  expect_vec_near(commutator(x, y), {0, 0, 2}, kTol);
}

TEST(Commutator, MatchesMatrixBracket) {
  oracle::SequenceGen gen(2);
  for (int i = 0; i < 30; ++i) {
    const Su2Vector a{gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2)};
    const Su2Vector b{gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2)};
    EXPECT_LE(max_abs_diff(matrix_commutator(element(a), element(b)), element(commutator(a, b))), kTol);
  }
}

TEST(Commutator, AxisAndReflectedAxis) {
  // |[A, ABA]| as elements: A and ABA are separated by Delta = phi2 - phi1.
  for (double p1 : {0.0, 0.9, 2.5})
    for (double delta : {0.3, 1.0, 2.2, 4.0}) {
      const Su2Vector a = Su2Vector::axis(p1);
      const Su2Vector aba = Su2Vector::axis(2 * p1 - (p1 + delta));
      const Mat2 am = Mat2::pauli(a);
      const Mat2 bm = Mat2::pauli(Su2Vector::axis(p1 + delta));
      const Mat2 matrix = matrix_commutator(am * cplx(0, -1), am * bm * am * cplx(0, -1));
      EXPECT_LE(max_abs_diff(matrix, element(commutator(a, aba))), kTol);
      EXPECT_NEAR(commutator(a, aba).norm(), 2 * std::abs(std::sin(delta)), kTol);
    }
}

TEST(Su2Series, Arithmetic) {
  Su2Series a(3);
  a.set(1, {1, 0, 0});
  a.set(3, {0, 2, 0});
  const Su2Series b = a * 2.0 + a.shifted_up(1);
  expect_vec_near(b[1], {2, 0, 0}, kTol);
  expect_vec_near(b[2], {1, 0, 0}, kTol);
  expect_vec_near(b[3], {0, 4, 0}, kTol);
  expect_vec_near(b[7], {}, 0.0);
  const Su2Series d = a.divided_by_eps();
  EXPECT_EQ(d.max_order(), 2);
  expect_vec_near(d[0], {1, 0, 0}, kTol);
  expect_vec_near(d[2], {0, 2, 0}, kTol);
  EXPECT_THROW(Su2Series::constant({1, 0, 0}, 2).divided_by_eps(), DomainError);
  expect_vec_near(a.evaluate(0.5), {0.5, 0.25, 0}, kTol);
}

TEST(SbchTruncated, CommutingArgumentsGiveSum) {
  const Su2Vector r{0.3, -1.0, 0.5};
  const Su2Series s = sbch_truncated(1.0, Su2Series::constant(r, 4), Su2Series::constant(r, 4), 4);
  expect_vec_near(s[1], 2.0 * r, kTol);
  for (int k : {0, 2, 3, 4}) expect_vec_near(s[k], {}, kTol);
}

TEST(SbchTruncated, ThirdOrderIsNestedBracket) {
  const auto g = bb1_generators(std::acos(-0.25), 3 * std::acos(-0.25));
  const Su2Series s = sbch_truncated(1.0, Su2Series::constant(g.r, 4), Su2Series::constant(g.s, 4), 4);
  expect_vec_near(s[1], g.r + g.s, kTol);
  expect_vec_near(s[3], -1.0 / 24.0 * commutator(g.r + 2.0 * g.s, commutator(g.r, g.s)), 1e-10);
}

TEST(SbchTruncated, DefectScalesAsFifthPower) {
  // Matrix oracle: series exponentials of the three factors against the
  // exponential of the truncated symmetric BCH.
  const auto g = bb1_generators(std::acos(-0.25), 3 * std::acos(-0.25));
  const Su2Series series = sbch_truncated(1.0, Su2Series::constant(g.r, 4), Su2Series::constant(g.s, 4), 4);
  auto defect = [&](double t) {
    const Mat2 lhs = oracle::expm(element(g.r) * cplx(t / 2)) * oracle::expm(element(g.s) * cplx(t)) *
                     oracle::expm(element(g.r) * cplx(t / 2));
    return oracle::frobenius(lhs - oracle::expm(element(series.evaluate(t))));
  };
  const double d1 = defect(0.1), d2 = defect(0.05), d3 = defect(0.025);
  EXPECT_NEAR(d1 / d2, 32.0, 3.2);
  EXPECT_NEAR(d2 / d3, 32.0, 3.2);
}

TEST(SbchTruncated, RejectsUnsupportedOrder) {
  const Su2Series a = Su2Series::constant({1, 0, 0}, 6);
  EXPECT_THROW(sbch_truncated(1.0, a, a, 5), UnsupportedOrderError);
  EXPECT_NO_THROW(sbch_truncated(1.0, a, a, 4));
}

TEST(PEpsilon, Bb1FirstOrderVanishesAndThirdOrderIsBracket) {
  const TargetRotation target(kPi, 0.0);
  const DesignResult d = design_wn(1, target);
  const Su2Series p = p_epsilon(d.sequence, target);
  EXPECT_LT(p[1].norm(), kTol);
  EXPECT_LT(p[2].norm(), kTol);
  const auto g = bb1_generators(d.phases[0], d.phases[1]);
  expect_vec_near(p[3], -1.0 / 24.0 * commutator(g.r + 2.0 * g.s, commutator(g.r, g.s)), 1e-10);
  EXPECT_NEAR(series_sixth_order_coefficient(p), 5 * std::pow(kPi, 6) / 1024, 1e-10);
}

TEST(PEpsilon, NaiveCorrectorKeepsFirstOrder) {
  const PulseSequence naive{Pulse(kPi, 0), Pulse(kTwoPi, 0), Pulse(kPi, 0)};
  EXPECT_GT(p_epsilon(naive, TargetRotation(kPi, 0.0))[1].norm(), 1.0);
}

TEST(PEpsilon, QTermsCancelWhenFirstOrderDoes) {
  // Redesigning for a different theta changes Q; the eps^3 term must stay the
  // bare bracket of the corrector generators.
  for (double theta : {0.4, 1.3, 2.0, kPi, 4.5, 8.0}) {
    const TargetRotation target(theta, 0.9);
    const DesignResult d = design_wn(1, target);
    const Su2Series p = p_epsilon(d.sequence, target);
    EXPECT_LT(p[1].norm(), 1e-12);
    const auto g = bb1_generators(d.phases[0], d.phases[1]);
    expect_vec_near(p[3], -1.0 / 24.0 * commutator(g.r + 2.0 * g.s, commutator(g.r, g.s)), 1e-9);
  }
}

TEST(PEpsilon, SeriesCoefficientMatchesFitForOtherThreePulseFamilies) {
  const TargetRotation target(kPi, kPi);
  for (const FamilySpec& fam : {FamilySpec::wm(2), FamilySpec::wm(3), FamilySpec::wn(2), FamilySpec::wn(3)}) {
    const DesignResult d = design_family(fam, target);
    const double c_series = series_sixth_order_coefficient(p_epsilon(d.sequence, target));
    const double c_fit = fit_sequence(d.sequence, target).coefficient;
    EXPECT_NEAR(c_fit / c_series, 1.0, 0.01) << fam.label();
  }
}

TEST(PEpsilon, RejectsOtherShapes) {
  EXPECT_THROW(p_epsilon(PulseSequence{Pulse(kPi, 0), Pulse(kPi, 0)}, TargetRotation(1, 0)), DomainError);
  EXPECT_THROW(p_epsilon(PulseSequence{Pulse(1.0, 0), Pulse(kTwoPi, 0), Pulse(1.0, 0)}, TargetRotation(1, 0)),
               DomainError);
}

TEST(AnalyticC, Examples) {
  EXPECT_NEAR(analytic_c(std::acos(-7.0 / 8.0)), 5 * std::pow(kPi, 6) / 1024, 1e-12);
  EXPECT_NEAR(analytic_c(std::acos(-7.0 / 8.0)), 4.694283, 1e-6);
  EXPECT_NEAR(analytic_c(0.0), 0.0, 1e-12);
  EXPECT_NEAR(analytic_c(kPi), 0.0, 1e-10);
}

TEST(AnalyticC, NonNegative) {
  for (int i = 0; i < 1000; ++i) EXPECT_GE(analytic_c(kTwoPi * i / 1000.0), -1e-12);
}

TEST(AnalyticC, TraceIdentityAgainstMatrices) {
  // Tr(([R+2S,[R,S]])^2) from the vector form (-2 |k|^2), from explicit
  // 2x2 products, and from the cosine expansion.
  oracle::SequenceGen gen(23);
  for (int i = 0; i < 20; ++i) {
    const double p1 = gen.uniform(0, kTwoPi), p2 = gen.uniform(0, kTwoPi);
    const auto g = bb1_generators(p1, p2);
    const Su2Vector k = commutator(g.r + 2.0 * g.s, commutator(g.r, g.s));
    const double from_series = -2.0 * k.dot(k);

    const Mat2 r = element(g.r), s = element(g.s);
    const Mat2 km = matrix_commutator(r + s * cplx(2.0), matrix_commutator(r, s));
    const cplx from_matrix = (km * km).trace();

    const double d = p2 - p1;
    const double from_cosines =
        -2.0 * std::pow(kPi, 6) * (40 + 16 * std::cos(d) - 40 * std::cos(2 * d) - 16 * std::cos(3 * d));
    const double scale = std::max(1.0, std::abs(from_series));
    EXPECT_NEAR(from_series, from_matrix.real(), 1e-10 * scale);
    EXPECT_NEAR(from_matrix.imag(), 0.0, 1e-10 * scale);
    EXPECT_NEAR(from_series, from_cosines, 1e-10 * scale);
    // and C = -Tr(...)/2304
    EXPECT_NEAR(-from_series / 2304.0, analytic_c(d), 1e-10 * scale);
  }
}

TEST(AnalyticC, AgreesWithFitAcrossTargets) {
  for (int i = 1; i <= 10; ++i) {
    const TargetRotation target(0.5 * i, 0.0);
    const DesignResult d = design_wn(1, target);
    const double c = analytic_c(d.phases[1] - d.phases[0]);
    const double fitted = fit_sequence(d.sequence, target).coefficient;
    EXPECT_NEAR(fitted / c, 1.0, 0.01) << "theta=" << target.theta;
  }
}
