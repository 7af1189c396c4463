#include <gtest/gtest.h>

#include <random>

#include "kernelwave/phase.hpp"
#include "kernelwave/series.hpp"

using namespace kernelwave;

namespace {

void expect_near(cplx a, cplx b, double tol) {
  EXPECT_LE(std::abs(a - b), tol) << a << " vs " << b;
}

Series1 from(std::vector<cplx> c, int order) { return Series1(order, c); }

} // namespace

TEST(Series1, ProductOfConjugateBinomials) {
  const Series1 r = from({1.0, 1.0}, 2) * from({1.0, -1.0}, 2);
  expect_near(r[0], 1.0, 0.0);
  expect_near(r[1], 0.0, 0.0);
  expect_near(r[2], -1.0, 0.0);
}

TEST(Series1, UnitIsNeutral) {
  const Series1 s = from({0.5, cplx(1, 2), -3.0, cplx(0, 0.25)}, 3);
  const Series1 r = s * Series1::constant(3, 1.0);
  for (int k = 0; k <= 3; ++k)
    expect_near(r[k], s[k], 0.0);
}

TEST(Series1, SquareOfExpSeriesIsExpOfTwoX) {
  Series1 e(6);
  double fact = 1.0;
  for (int k = 0; k <= 6; ++k) {
    if (k)
      fact *= k;
    e[k] = 1.0 / fact;
  }
  const Series1 sq = e * e;
  fact = 1.0;
  for (int k = 0; k <= 6; ++k) {
    if (k)
      fact *= k;
    expect_near(sq[k], std::pow(2.0, k) / fact, 1e-15);
  }
}

TEST(Series1, MismatchedOrdersAreRejected) {
  EXPECT_THROW(Series1(2) * Series1(3), UsageError);
  EXPECT_THROW(Series1(-1), UsageError);
}

TEST(Series1, ComposeByHand) {
  const Series1 r = compose(from({0.0, 0.0, 1.0}, 3), from({0.0, 1.0, 1.0}, 3));
  expect_near(r[0], 0.0, 0.0);
  expect_near(r[1], 0.0, 0.0);
  expect_near(r[2], 1.0, 1e-15);
  expect_near(r[3], 2.0, 1e-15);
}

TEST(Series1, ComposeWithIdentity) {
  const Series1 inner = from({0.0, cplx(0.3, 1), -2.0, 0.7}, 3);
  const Series1 r = compose(Series1::variable(3), inner);
  for (int k = 0; k <= 3; ++k)
    expect_near(r[k], inner[k], 1e-15);
}

TEST(Series1, ComposeNeedsZeroConstantTerm) {
  EXPECT_THROW(compose(Series1::variable(3), from({1.0, 1.0}, 3)), UsageError);
}

TEST(Series1, ReciprocalOfOneMinusX) {
  const Series1 r = reciprocal(from({1.0, -1.0}, 4));
  for (int k = 0; k <= 4; ++k)
    expect_near(r[k], 1.0, 1e-15);
  EXPECT_THROW(reciprocal(Series1::variable(4)), SingularSeriesError);
}

TEST(Series1, ExpOfZeroAndOfShiftedArgument) {
  const Series1 one = exp(Series1(5));
  expect_near(one[0], 1.0, 0.0);
  for (int k = 1; k <= 5; ++k)
    expect_near(one[k], 0.0, 0.0);
  // exp(c + x) = e^c exp(x)
  const cplx c(0.4, -1.3);
  const Series1 e = exp(from({c, 1.0}, 5));
  double fact = 1.0;
  for (int k = 0; k <= 5; ++k) {
    if (k)
      fact *= k;
    expect_near(e[k], std::exp(c) / fact, 1e-14);
  }
}

TEST(Series1, DerivativeAndConjugation) {
  const Series1 s = from({1.0, cplx(0, 2), 3.0}, 2);
  const Series1 d = derivative(s);
  EXPECT_EQ(d.order(), 1);
  expect_near(d[0], cplx(0, 2), 0.0);
  expect_near(d[1], 6.0, 0.0);
  const Series1 cc = conjugate_coeffs(conjugate_coeffs(s));
  for (int k = 0; k <= 2; ++k)
    expect_near(cc[k], s[k], 0.0);
}

TEST(Series2, ProductAndEvaluation) {
  const Series2 p = Series2::linear(4, 1.0, -I);
  const Series2 sq = p * p;
  const cplx x(0.2, 0.1), y(-0.3, 0.05);
  expect_near(sq.evaluate(x, y), (x - I * y) * (x - I * y), 1e-15);
  EXPECT_THROW(sq(3, 2), UsageError);
}

TEST(Series2, ReciprocalAndExpRoundTrip) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1, 1);
  Series2 a(6);
  for (int k = 0; k <= 6; ++k)
    for (int l = 0; k + l <= 6; ++l)
      a(k, l) = cplx(d(rng), d(rng)) * 0.3;
  a(0, 0) = cplx(1.2, 0.4);
  const Series2 one = a * reciprocal(a);
  expect_near(one(0, 0), 1.0, 1e-14);
  for (int k = 0; k <= 6; ++k)
    for (int l = 0; k + l <= 6; ++l)
      if (k + l > 0)
        expect_near(one(k, l), 0.0, 1e-13);
  // exp(a) exp(-a) = 1
  const Series2 e = exp(a) * exp(a * -1.0);
  expect_near(e(0, 0), 1.0, 1e-14);
  expect_near(e(2, 3), 0.0, 1e-13);
}

TEST(Series2, DividedDifferenceTimesDenominatorRoundTrips) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1, 1);
  Series1 s(9);
  for (int k = 0; k <= 9; ++k)
    s[k] = cplx(d(rng), d(rng));
  s[1] = cplx(1.0, 0.5);
  const int n = 8;
  // (s(x) - s(iy)) = DD * (x - iy)
  const Series2 dd = divided_difference(s, 1.0, 0.0, 0.0, I, n);
  const Series2 lhs = substitute(truncate(s, n), 1.0, 0.0) - substitute(truncate(s, n), 0.0, I);
  const Series2 rhs = dd * Series2::linear(n, 1.0, -I);
  for (int k = 0; k <= n; ++k)
    for (int l = 0; k + l <= n; ++l)
      expect_near(lhs(k, l), rhs(k, l), 1e-13);
  // and the reciprocal of the divided difference undoes it
  const Series2 back = rhs * reciprocal(dd);
  const Series2 lin = Series2::linear(n, 1.0, -I);
  for (int k = 0; k <= n; ++k)
    for (int l = 0; k + l <= n; ++l)
      expect_near(back(k, l), lin(k, l), 1e-13);
}

TEST(Branch, AiryCoefficients) {
  const PhaseSpec ph = make_phase(PhaseKind::airy_cubic);
  const Series1 g = solve_branch(ph, I, -1, ph.levels[0], expi(pi / 4), 12);
  expect_near(g[0], I, 1e-15);
  expect_near(g[1], expi(pi / 4), 1e-15);
  expect_near(g[2], -1.0 / 6.0, 1e-15);
  expect_near(g[3], 5.0 / 72.0 * expi(-pi / 4), 1e-15);
  EXPECT_LT(branch_residual(ph.f, g, -1, ph.levels[0]), 1e-13);
}

TEST(Branch, AiryCompositionGivesLevelMinusSquare) {
  const PhaseSpec ph = make_phase(PhaseKind::airy_cubic);
  const Series1 g = solve_branch(ph, I, -1, ph.levels[0], expi(pi / 4), 8);
  const Series1 fg = compose(ph.f, g);
  expect_near(fg[0], 2.0 * I / 3.0, 1e-15);
  expect_near(fg[2], -1.0, 1e-14);
  for (int k : {1, 3, 4, 5, 6, 7, 8})
    expect_near(fg[k], 0.0, 1e-13);
}

TEST(Branch, PearceyCoefficients) {
  const PhaseSpec ph = make_phase(PhaseKind::pearcey_quartic);
  const double r = std::sqrt(2.0 / 3.0);
  const Series1 g = solve_branch(ph, expi(pi / 3), 1, ph.levels[0], r * expi(2 * pi / 3), 12);
  expect_near(g[0], expi(pi / 3), 1e-15);
  expect_near(g[1], r * expi(2 * pi / 3), 1e-15);
  expect_near(g[2], 2.0 / 9.0, 1e-15);
  // third coefficient from an independent symbolic series inversion
  expect_near(g[3], -7.0 / 54.0 * r * expi(pi / 3), 1e-15);
  EXPECT_LT(branch_residual(ph.f, g, 1, ph.levels[0]), 1e-13);
}

TEST(Branch, QuadraticPhaseIsItsOwnBranch) {
  const Series1 g = solve_branch(Polynomial({0.0, 0.0, 1.0}), 0.0, 1, 0.0, 1.0, 6);
  expect_near(g[1], 1.0, 0.0);
  for (int k : {0, 2, 3, 4, 5, 6})
    expect_near(g[k], 0.0, 0.0);
}

TEST(Branch, ErrorCases) {
  const Polynomial cubic({0.0, 0.0, 0.0, 1.0});
  EXPECT_THROW(solve_branch(cubic, 0.0, 1, 0.0, 1.0, 4), DegenerateSaddleError);
  const PhaseSpec ph = make_phase(PhaseKind::airy_cubic);
  EXPECT_THROW(solve_branch(ph, I, -1, ph.levels[0], 1.0, 4), BranchError);
  EXPECT_THROW(solve_branch(ph, I, -1, 0.0, expi(pi / 4), 4), BranchError);
  EXPECT_THROW(solve_branch(ph, 0.5, -1, ph.f(0.5), expi(pi / 4), 4), BranchError);
}

TEST(Branch, ConjugateBranchStartsAtMirrorSaddle) {
  const PhaseSpec a = make_phase(PhaseKind::airy_cubic);
  expect_near(conjugate_coeffs(solve_branch(a, I, -1, a.levels[0], expi(pi / 4), 4))[0], -I, 0.0);
  const PhaseSpec p = make_phase(PhaseKind::pearcey_quartic);
  const Series1 g = solve_branch(p, p.saddles[0], 1, p.levels[0], std::sqrt(2.0 / 3.0) * expi(2 * pi / 3), 4);
  expect_near(conjugate_coeffs(g)[0], expi(-pi / 3), 1e-15);
}
