#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "common.hpp"
#include "kernels.hpp"
#include "series.hpp"

namespace kernelwave {

enum class Transition { airy_to_s1, pearcey_to_s2 };

inline std::string to_string(Transition t) { return t == Transition::airy_to_s1 ? "airy-to-s1" : "pearcey-to-s2"; }

inline Transition parse_transition(const std::string& s) {
  if (s == "airy-to-s1" || s == "airy")
    return Transition::airy_to_s1;
  if (s == "pearcey-to-s2" || s == "pearcey")
    return Transition::pearcey_to_s2;
  throw UsageError("unknown transition '" + s + "'");
}

/// Evaluation point (u, v, tau1, tau2).
struct Point {
  double u = 0.0, v = 0.0, tau1 = 0.0, tau2 = 0.0;
};

/// Taylor coefficients of the four amplitude functions at one point. The
/// starred series are built from their own substitutions, not by symmetry.
struct ExpansionCoefficients {
  Transition transition = Transition::airy_to_s1;
  int order = 0;
  Series2 b{0}, c{0}, b_star{0}, c_star{0};
  Point at_point;
};

/// Exact zero for equal parity of k and l.
inline cplx gauss_moment_B(int k, int l) {
  if (k < 0 || l < 0)
    throw UsageError("gauss_moment_B: indices must be nonnegative");
  if ((k + l) % 2 == 0)
    return 0.0;
  // int_0^{2 pi} cos^m sin^n
  auto angular = [](int m, int n) {
    if (m % 2 || n % 2)
      return 0.0;
    return 2.0 * half_gamma(m + 1) * half_gamma(n + 1) / half_gamma(m + n + 2);
  };
  return 0.5 * half_gamma(k + l + 1) * cplx(angular(k + 1, l), angular(k, l + 1));
}

inline double gauss_moment_C(int k) {
  if (k < 0)
    throw UsageError("gauss_moment_C: index must be nonnegative");
  return k % 2 ? 0.0 : half_gamma(k + 1);
}

struct GaussMoments {
  std::vector<std::vector<cplx>> B;
  std::vector<double> C;
};

inline GaussMoments gauss_moments(int max_index) {
  GaussMoments g;
  for (int k = 0; k <= max_index; ++k) {
    g.B.emplace_back();
    for (int l = 0; l <= max_index; ++l)
      g.B.back().push_back(gauss_moment_B(k, l));
    g.C.push_back(gauss_moment_C(k));
  }
  return g;
}

namespace detail {

/// One contour variable as sigma * h(s t), t being x or y.
struct Arm {
  const Series1* h;
  double sigma;
  cplx s;
};

/// exp(-v zeta - tau2 zeta^2 + u omega + tau1 omega^2) zeta'(x) omega'(y) / (zeta - omega),
/// times the linear factor that cancels the pole when the arms cross.
inline Series2 amplitude(const Arm& z, const Arm& w, bool crossing, int n, const Point& pt) {
  const Series1 hz = truncate(*z.h, n), hw = truncate(*w.h, n);
  const Series2 Z = z.sigma * substitute(hz, z.s, 0.0);
  const Series2 W = w.sigma * substitute(hw, 0.0, w.s);
  const Series2 dZ = (z.sigma * z.s) * substitute(derivative(*z.h), z.s, 0.0);
  const Series2 dW = (w.sigma * w.s) * substitute(derivative(*w.h), 0.0, w.s);
  const Series2 rest = -pt.v * Z - pt.tau2 * (Z * Z) + pt.u * W + pt.tau1 * (W * W);
  Series2 inv(n);
  if (crossing) {
    if (z.h != w.h || z.sigma != w.sigma)
      throw BranchError("amplitude: crossing arms must share a branch");
    // zeta - omega = sigma s_z (x - (s_w/s_z) y) DD
    inv = reciprocal(divided_difference(*z.h, z.s, 0.0, 0.0, w.s, n)) * (1.0 / (z.sigma * z.s));
  } else {
    inv = reciprocal(Z - W);
  }
  return exp(rest) * dZ * dW * inv;
}

} // namespace detail

/// Amplitude coefficients through total degree `order` at the given point.
inline ExpansionCoefficients build_amplitudes(Transition t, const Point& pt, int order) {
  if (order < 0)
    throw UsageError("build_amplitudes: order must be nonnegative");
  ExpansionCoefficients ec;
  ec.transition = t;
  ec.order = order;
  ec.at_point = pt;
  using detail::Arm;
  if (t == Transition::airy_to_s1) {
    const Series1 g = solve_branch(Polynomial({0.0, 1.0, 0.0, 1.0 / 3.0}), I, -1, 2.0 * I / 3.0, expi(pi / 4),
                                   order + 1);
    const Arm s_hi{&g, 1.0, 1.0}, t_hi{&g, 1.0, I}, s_lo{&g, -1.0, -I}, t_lo{&g, -1.0, -1.0};
    ec.b = detail::amplitude(s_hi, t_hi, true, order, pt);
    ec.c = detail::amplitude(s_hi, t_lo, false, order, pt);
    ec.b_star = detail::amplitude(s_lo, t_lo, true, order, pt);
    ec.c_star = detail::amplitude(s_lo, t_hi, false, order, pt);
  } else {
    const Polynomial f({0.0, 1.0, 0.0, 0.0, 0.25});
    const cplx up = expi(pi / 3);
    const Series1 g = solve_branch(f, up, 1, f(up), std::sqrt(2.0 / 3.0) * expi(2 * pi / 3), order + 1);
    const Series1 gb = conjugate_coeffs(g);
    const Arm s_hi{&g, 1.0, 1.0}, t_hi{&g, 1.0, I}, s_lo{&gb, 1.0, -1.0}, t_lo{&gb, 1.0, I};
    ec.b = detail::amplitude(s_hi, t_hi, true, order, pt);
    ec.c = detail::amplitude(s_hi, t_lo, false, order, pt);
    ec.b_star = detail::amplitude(s_lo, t_lo, true, order, pt);
    ec.c_star = detail::amplitude(s_lo, t_hi, false, order, pt);
  }
  return ec;
}

/// Starred b series from the unstarred one: coefficient (k,l) is (-1)^{k+l+1} conj(b_{k,l}).
inline Series2 b_star_by_symmetry(const Series2& b) {
  Series2 r(b.order());
  for (int k = 0; k <= b.order(); ++k)
    for (int l = 0; k + l <= b.order(); ++l)
      r(k, l) = ((k + l) % 2 ? 1.0 : -1.0) * std::conj(b(k, l));
  return r;
}

/// Starred c series from the unstarred one: coefficient (k,l) is (-1)^{k+l} conj(c_{k,l}).
inline Series2 c_star_by_symmetry(const Series2& c) {
  Series2 r(c.order());
  for (int k = 0; k <= c.order(); ++k)
    for (int l = 0; k + l <= c.order(); ++l)
      r(k, l) = ((k + l) % 2 ? -1.0 : 1.0) * std::conj(c(k, l));
  return r;
}

/// Largest coefficient gap between the independently built starred series and
/// their symmetry images.
inline double symmetry_defect(const ExpansionCoefficients& ec) {
  const Series2 bs = b_star_by_symmetry(ec.b), cs = c_star_by_symmetry(ec.c);
  double d = 0.0;
  for (int k = 0; k <= ec.order; ++k)
    for (int l = 0; k + l <= ec.order; ++l)
      d = std::max({d, std::abs(bs(k, l) - ec.b_star(k, l)), std::abs(cs(k, l) - ec.c_star(k, l))});
  return d;
}

/// Value of the Airy c amplitude at the origin in closed form.
inline cplx airy_c00(double u, double v, double tau1, double tau2) {
  return 0.5 * std::exp(-(tau1 - tau2)) * expi(-(u + v));
}

inline double fluc_s1(double u, double v, double tau1, double tau2, double a) {
  if (!(a > 0))
    throw UsageError("fluc_s1: a must be positive");
  const double f = (u + v) * std::cos(u - v) - 2.0 * (tau1 + tau2) * std::sin(u - v);
  return -std::pow(a, -1.5) * std::exp(-(tau1 - tau2)) * (f + std::cos(4.0 / 3.0 * std::pow(a, 1.5) - (u + v))) /
         (4.0 * pi);
}

/// Pearcey fluctuation term. The phase of the cosine is (sqrt(3)/2)(u + v + tau1 + tau2),
/// which is what the c amplitude at the origin produces.
inline double fluc_s2(double u, double v, double tau1, double tau2, double a) {
  if (!(a > 0))
    throw UsageError("fluc_s2: a must be positive");
  const double r3 = std::sqrt(3.0);
  const double ph = r3 / 2.0 * (u - v + tau1 - tau2);
  const double f = ((u + v) / 2.0 - (tau1 + tau2)) * std::sin(ph) + r3 * ((u + v) / 2.0 + (tau1 + tau2)) * std::cos(ph);
  const double osc = std::cos(3.0 * r3 / 4.0 * std::pow(a, 4.0 / 3.0) + r3 / 2.0 * (u + v + tau1 + tau2));
  return std::pow(a, -4.0 / 3.0) * std::exp((u - v) / 2.0 - (tau1 - tau2) / 2.0) * (f - 2.0 / r3 * osc) / (6.0 * pi);
}

inline int required_order(int N) { return std::max(2 * N - 1, 0); }

namespace detail {

inline double big_a(Transition t, double a) {
  return t == Transition::airy_to_s1 ? std::pow(a, 1.5) : std::pow(a, 4.0 / 3.0);
}

inline double oscillation_phase(Transition t, double a) {
  return t == Transition::airy_to_s1 ? 4.0 / 3.0 * std::pow(a, 1.5) : -3.0 * std::sqrt(3.0) / 4.0 * std::pow(a, 4.0 / 3.0);
}

} // namespace detail

/// The nu-th term of the expansion summed over all four saddle pairs, before
/// taking real parts. Its imaginary part measures how well the pairing holds.
inline cplx expansion_term_full(const ExpansionCoefficients& ec, int nu, double a) {
  if (nu < 1 || 2 * nu - 1 > ec.order)
    throw UsageError("expansion term " + std::to_string(nu) + " needs order " + std::to_string(2 * nu - 1));
  const double theta = detail::oscillation_phase(ec.transition, a);
  cplx s{};
  for (int k = 0; k <= 2 * nu - 1; ++k) {
    const int l = 2 * nu - 1 - k;
    const cplx B = gauss_moment_B(k, l);
    s += ec.b(k, l) * B + ec.b_star(k, l) * std::conj(B);
  }
  for (int k = 0; k <= nu - 1; ++k) {
    const int l = nu - 1 - k;
    const double g = gauss_moment_C(2 * k) * gauss_moment_C(2 * l);
    s += (ec.c(2 * k, 2 * l) * expi(theta) + ec.c_star(2 * k, 2 * l) * expi(-theta)) * g;
  }
  return -s * std::pow(detail::big_a(ec.transition, a), -nu) / (4.0 * pi * pi);
}

/// The nu-th term in its paired form 2 Re{...}.
inline double expansion_term(const ExpansionCoefficients& ec, int nu, double a) {
  if (nu < 1 || 2 * nu - 1 > ec.order)
    throw UsageError("expansion term " + std::to_string(nu) + " needs order " + std::to_string(2 * nu - 1));
  const double theta = detail::oscillation_phase(ec.transition, a);
  double s = 0.0;
  for (int k = 0; k <= 2 * nu - 1; ++k)
    s += (ec.b(k, 2 * nu - 1 - k) * gauss_moment_B(k, 2 * nu - 1 - k)).real();
  for (int k = 0; k <= nu - 1; ++k) {
    const int l = nu - 1 - k;
    s += (ec.c(2 * k, 2 * l) * expi(theta)).real() * gauss_moment_C(2 * k) * gauss_moment_C(2 * l);
  }
  return -2.0 * s * std::pow(detail::big_a(ec.transition, a), -nu) / (4.0 * pi * pi);
}

/// The leading kernel: S1 for the Airy transition, S2 for the Pearcey one.
inline KernelValue leading_kernel(Transition t, const Point& p, const QuadOptions& o = {}) {
  return t == Transition::airy_to_s1 ? s1_kernel(p.tau1, p.tau2, p.u, p.v, o) : s2_kernel(p.tau1, p.tau2, p.u, p.v, o);
}

/// Leading kernel plus the first N expansion terms, with coefficients already built.
inline double expansion_partial_sum(const ExpansionCoefficients& ec, int N, double a, const QuadOptions& o = {}) {
  if (N < 0)
    throw UsageError("expansion_partial_sum: N must be nonnegative");
  if (required_order(N) > ec.order)
    throw UsageError("expansion_partial_sum: N = " + std::to_string(N) + " exceeds the coefficient order");
  double s = leading_kernel(ec.transition, ec.at_point, o).value.real();
  for (int nu = 1; nu <= N; ++nu)
    s += expansion_term(ec, nu, a);
  return s;
}

inline double expansion_partial_sum(Transition t, int N, double u, double v, double tau1, double tau2, double a,
                                    const QuadOptions& o = {}) {
  if (!(a > 0))
    throw UsageError("expansion_partial_sum: a must be positive");
  return expansion_partial_sum(build_amplitudes(t, {u, v, tau1, tau2}, required_order(N)), N, a, o);
}

/// The rescaled kernel that the expansion approximates.
inline KernelValue rescaled_lhs(Transition t, double a, const Point& p, Backend b = Backend::direct,
                                const QuadOptions& o = {}) {
  return t == Transition::airy_to_s1 ? rescaled_airy_lhs(a, p.tau1, p.tau2, p.u, p.v, b, o)
                                     : rescaled_pearcey_lhs(a, p.tau1, p.tau2, p.u, p.v, b, o);
}

} // namespace kernelwave
