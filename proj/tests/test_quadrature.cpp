#include <gtest/gtest.h>

#include <random>

#include "kernelwave/gauss_legendre.hpp"
#include "kernelwave/quadrature.hpp"

using namespace kernelwave;

namespace {

Contour circle(int n) {
  Contour c;
  for (int k = 0; k < n; ++k) {
    Panel p;
    p.t0 = 2 * pi * k / n;
    p.t1 = 2 * pi * (k + 1) / n;
    p.map = [](double t) { return std::pair<cplx, cplx>{expi(t), I * expi(t)}; };
    c.append(p, k == 0);
  }
  return c;
}

/// Line through 0 along `dir`, cut at 0 and +-0.3, from -R to R.
Contour model_line(cplx dir, double R = 7.0) {
  Contour c;
  const double cuts[] = {-R, -0.3, 0.0, 0.3, R};
  for (int k = 0; k < 4; ++k)
    c.append(segment_panel(cuts[k] * dir, cuts[k + 1] * dir), k == 0);
  c.crossings.push_back(0.0);
  return c;
}

/// int int e^{-x^2-y^2} x^k y^l / (x - iy) with zeta = x, omega = iy.
QuadResult model_moment(int k, int l, const QuadOptions& o = {}) {
  return integrate_double(
      [k, l](cplx z, cplx w) {
        const cplx y = w / I;
        return std::exp(-z * z - y * y) * std::pow(z, k) * std::pow(y, l) / (z - w) / I;
      },
      model_line(1.0), model_line(I), o);
}

} // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 16, 32}) {
    const GaussRule r = gauss_legendre(n);
    ASSERT_EQ(r.x.size(), static_cast<std::size_t>(n));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0;
      for (int i = 0; i < n; ++i)
        s += r.w[i] * std::pow(r.x[i], d);
      EXPECT_NEAR(s, d % 2 ? 0.0 : 2.0 / (d + 1), 1e-14) << "n=" << n << " d=" << d;
    }
  }
  EXPECT_THROW(gauss_legendre(0), UsageError);
}

TEST(Options, Validation) {
  QuadOptions o;
  EXPECT_NO_THROW(o.validate());
  o.nodes_per_panel = 0;
  EXPECT_THROW(o.validate(), UsageError);
  o = {};
  o.rel_tol = -1;
  EXPECT_THROW(o.validate(), UsageError);
}

TEST(Single, CircleResidue) {
  const QuadResult r = integrate_single([](cplx z) { return 1.0 / z; }, circle(8));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.value - 2.0 * pi * I), 1e-12);
}

TEST(Single, SegmentAntiderivatives) {
  Contour c;
  c.append(segment_panel(-I, I), true);
  auto seg = [&](double d) {
    return integrate_single([d](cplx w) { return std::exp(d * w); }, c).value / (2.0 * pi * I);
  };
  EXPECT_LT(std::abs(seg(pi)), 1e-15);
  EXPECT_LT(std::abs(seg(0.0) - 1.0 / pi), 1e-15);
  EXPECT_LT(std::abs(seg(0.7) - std::sin(0.7) / (pi * 0.7)), 1e-15);
}

TEST(Truncation, RayRadii) {
  const double airy = truncation_radius([](double r) { return -r * r * r / 3.0; }, 60.0);
  EXPECT_NEAR(airy, std::cbrt(180.0), 1e-10);
  const double pearcey = truncation_radius([](double r) { return -std::pow(r, 4) / 4.0; }, 60.0);
  EXPECT_NEAR(pearcey, std::pow(240.0, 0.25), 1e-10);
  // same radii through truncate_rays with a full exponent along complex rays
  const Contour c = truncate_rays({{0.0, expi(pi / 3), false}}, [](cplx z) { return (z * z * z / 3.0).real(); },
                                  60.0, 0.25);
  ASSERT_EQ(c.ray_radii.size(), 1u);
  EXPECT_NEAR(c.ray_radii[0], std::cbrt(180.0), 1e-10);
}

TEST(Truncation, Errors) {
  EXPECT_THROW(truncation_radius([](double r) { return -r; }, 0.0), GeometryError);
  EXPECT_THROW(truncation_radius([](double r) { return r; }, 60.0), GeometryError);
  EXPECT_THROW(truncate_rays({{0.0, 1.0, false}}, [](cplx z) { return z.real(); }, 60.0, 0.25), GeometryError);
}

TEST(Truncation, RaysFormOnePiece) {
  const Contour c = truncate_rays({{0.25, expi(-pi / 3), true}, {0.25, expi(pi / 3), false}},
                                  [](cplx z) { return (z * z * z / 3.0).real(); }, 60.0, 0.25);
  EXPECT_NO_THROW(validate(c));
  EXPECT_TRUE(c.panels.front().starts_piece);
  int pieces = 0;
  for (const auto& p : c.panels)
    pieces += p.starts_piece;
  EXPECT_EQ(pieces, 1);
  EXPECT_NEAR(std::abs(c.panels.front().start() - 0.25), c.ray_radii[0], 1e-12);
  EXPECT_LT(std::arg(c.panels.back().end() - 0.25) - pi / 3, 1e-12);
}

TEST(Double, CrossingMomentsWithPolarRule) {
  EXPECT_LT(std::abs(model_moment(1, 1).value), 1e-12);
  const QuadResult b10 = model_moment(1, 0);
  EXPECT_TRUE(b10.converged);
  EXPECT_LT(std::abs(b10.value - pi / 2), 1e-10);
  EXPECT_LT(std::abs(model_moment(0, 1).value - I * (pi / 2)), 1e-10);
  EXPECT_LT(std::abs(model_moment(2, 1).value - I * (pi / 8)), 1e-10);
}

TEST(Double, UndeclaredCrossingIsAGeometryError) {
  Contour a = model_line(1.0), b = model_line(I);
  a.crossings.clear();
  b.crossings.clear();
  EXPECT_THROW(integrate_cauchy([](cplx) { return cplx(1.0); }, [](cplx) { return cplx(1.0); }, a, b), GeometryError);
}

TEST(Double, SeparableEqualsProductOfSingles) {
  Contour a, b;
  a.append(segment_panel(cplx(0, -1), cplx(1, 0.5)), true);
  a.append(segment_panel(cplx(1, 0.5), cplx(0.3, 2)), false);
  b.append(segment_panel(-2.0, cplx(-1, 1)), true);
  auto g = [](cplx z) { return std::exp(z) * std::cos(2.0 * z); };
  auto h = [](cplx w) { return 1.0 / (w - 3.0) + w * w; };
  const cplx prod = integrate_single(g, a).value * integrate_single(h, b).value;
  const cplx dbl = integrate_double([&](cplx z, cplx w) { return g(z) * h(w); }, a, b).value;
  EXPECT_LT(std::abs(dbl - prod), 1e-11 * std::max(1.0, std::abs(prod)));
}

TEST(Double, CauchyFastPathMatchesGenericRule) {
  Contour a, b;
  a.append(segment_panel(cplx(1, -2), cplx(1, 2)), true);
  b.append(segment_panel(cplx(-1, -2), cplx(-0.5, 2)), true);
  auto p = [](cplx z) { return std::exp(-z * z / 4.0); };
  auto q = [](cplx w) { return std::exp(w); };
  const cplx fast = integrate_cauchy(p, q, a, b).value;
  const cplx slow = integrate_double([&](cplx z, cplx w) { return p(z) * q(w) / (z - w); }, a, b).value;
  EXPECT_LT(std::abs(fast - slow), 1e-13);
}

TEST(Double, ErrorEstimatesAreHonest) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  int honest = 0, total = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const cplx c1(d(rng), d(rng)), c2(d(rng), d(rng));
    const double sep = 0.3 + 0.5 * (d(rng) + 1);
    Contour a, b;
    a.append(segment_panel(cplx(sep, -2), cplx(sep, 0)), true);
    a.append(segment_panel(cplx(sep, 0), cplx(sep, 2)), false);
    b.append(segment_panel(cplx(-sep, -2), cplx(-sep, 2)), true);
    auto p = [&](cplx z) { return std::exp(c1 * z * z); };
    auto q = [&](cplx w) { return std::exp(c2 * w); };
    QuadOptions loose;
    loose.nodes_per_panel = 6;
    loose.rel_tol = 1e-7;
    loose.abs_tol = 1e-300;
    QuadOptions tight;
    tight.nodes_per_panel = 48;
    const QuadResult r = integrate_cauchy(p, q, a, b, loose);
    const QuadResult ref = integrate_cauchy(p, q, a, b, tight);
    ++total;
    honest += r.error >= std::abs(r.value - ref.value);
  }
  EXPECT_GE(honest, 0.95 * total);
}

TEST(Double, WorkCapStopsRefinement) {
  QuadOptions o;
  o.max_pair_evaluations = 1e5;
  o.rel_tol = 1e-15;
  o.abs_tol = 1e-300;
  Contour a, b;
  a.append(segment_panel(0.0, 1.0), true);
  b.append(segment_panel(cplx(0, 2), cplx(1, 2)), true);
  // kink inside both panels keeps successive levels apart
  auto F = [](cplx z, cplx w) { return cplx(std::sqrt(std::abs(z.real() - 0.3137)) * std::abs(w.real() - 0.71)); };
  const QuadResult r = integrate_double(F, a, b, o);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.levels, 4);
  EXPECT_GT(r.error, 0.0);
}
