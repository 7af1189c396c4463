#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "common.hpp"
#include "phase.hpp"
#include "quadrature.hpp"

namespace kernelwave {

enum class KernelId { airy_ext, pearcey_ext, sine_ext, s1, s2, transition };
enum class Backend { direct, saddle };
enum class Variance { four_pi, two_pi };

inline std::string to_string(KernelId k) {
  switch (k) {
  case KernelId::airy_ext: return "airy-ext";
  case KernelId::pearcey_ext: return "pearcey-ext";
  case KernelId::sine_ext: return "sine-ext";
  case KernelId::s1: return "s1";
  case KernelId::s2: return "s2";
  case KernelId::transition: return "transition-a";
  }
  return "?";
}

inline KernelId parse_kernel(const std::string& s) {
  for (KernelId k : {KernelId::airy_ext, KernelId::pearcey_ext, KernelId::sine_ext, KernelId::s1, KernelId::s2,
                     KernelId::transition})
    if (s == to_string(k))
      return k;
  if (s == "transition")
    return KernelId::transition;
  throw UsageError("unknown kernel '" + s + "'");
}

inline std::string to_string(Backend b) { return b == Backend::direct ? "direct" : "saddle"; }

inline Backend parse_backend(const std::string& s) {
  if (s == "direct")
    return Backend::direct;
  if (s == "saddle")
    return Backend::saddle;
  throw UsageError("unknown backend '" + s + "'");
}

struct KernelQuery {
  KernelId kernel = KernelId::sine_ext;
  double tau1 = 0.0, tau2 = 0.0, u = 0.0, v = 0.0;
  std::optional<double> a_param;
  Backend backend = Backend::direct;
  QuadOptions opts;

  void validate() const {
    if ((kernel == KernelId::transition) != a_param.has_value())
      throw UsageError("a_param is required for transition-a and only for it");
    if (a_param && !(*a_param >= 0.0))
      throw UsageError("a_param must be >= 0");
    opts.validate();
  }
};

struct KernelValue {
  cplx value{};
  double imag_residual = 0.0;
  double error_estimate = 0.0;
  Backend backend_used = Backend::direct;
  bool converged = true;
};

/// Gaussian subtraction, active only for dt > 0.
inline double heat_term(double dt, double dx, Variance variance) {
  if (dt <= 0.0)
    return 0.0;
  const double c = variance == Variance::four_pi ? 4.0 : 2.0;
  return std::exp(-dx * dx / (c * dt)) / std::sqrt(c * pi * dt);
}

/// Exponents P, Q of (1/(2 pi i)^2) int int e^{P(zeta) + Q(omega)} / (zeta - omega).
struct CauchyPhases {
  Polynomial P, Q;
};

inline CauchyPhases airy_phases(double tau1, double tau2, double u, double v) {
  return {Polynomial({0.0, -v, -tau2, 1.0 / 3.0}), Polynomial({0.0, u, tau1, -1.0 / 3.0})};
}

inline CauchyPhases pearcey_phases(double tau1, double tau2, double u, double v) {
  return {Polynomial({0.0, -v, -tau2 / 2.0, 0.0, -0.25}), Polynomial({0.0, u, tau1 / 2.0, 0.0, 0.25})};
}

inline CauchyPhases transition_phases(double a, double tau1, double tau2, double u, double v) {
  return {Polynomial({0.0, -v, -tau2 / 2.0, a / 3.0, -0.25}), Polynomial({0.0, u, tau1 / 2.0, -a / 3.0, 0.25})};
}

/// Airy kernel after zeta -> sqrt(a) zeta, with A = a^{3/2}.
inline CauchyPhases rescaled_airy_phases(double a, double tau1, double tau2, double u, double v) {
  const double A = std::pow(a, 1.5);
  return {Polynomial({0.0, A - v, -tau2, A / 3.0}), Polynomial({0.0, u - A, tau1, -A / 3.0})};
}

/// Pearcey kernel after zeta -> a^{1/3} zeta, with A = a^{4/3}.
inline CauchyPhases rescaled_pearcey_phases(double a, double tau1, double tau2, double u, double v) {
  const double A = std::pow(a, 4.0 / 3.0);
  return {Polynomial({0.0, -A - v, -tau2, 0.0, -A / 4.0}), Polynomial({0.0, A + u, tau1, 0.0, A / 4.0})};
}

/// Knobs for the non-crossing ray geometry.
struct DirectGeometry {
  double delta = 0.25;
  /// Zeta ray angle (Airy type) or right-V ray angle of the omega contour (Pearcey type).
  double ray_angle = pi / 3;
};

namespace detail {

inline KernelValue make_value(cplx value, double error, bool converged, Backend b) {
  KernelValue kv;
  kv.value = value;
  kv.imag_residual = std::abs(value.imag());
  kv.error_estimate = error;
  kv.backend_used = b;
  kv.converged = converged;
  return kv;
}

inline std::function<double(cplx)> real_part_of(const Polynomial& P) {
  return [P](cplx z) { return P(z).real(); };
}

/// (1/(2 pi i)^2) int int exp(P + Q) / (zeta - omega).
inline QuadResult cauchy_exp(const CauchyPhases& ph, const Contour& A, const Contour& B, const QuadOptions& o) {
  const Polynomial& P = ph.P;
  const Polynomial& Q = ph.Q;
  QuadResult r = integrate_cauchy([&](cplx z) { return std::exp(P(z)); }, [&](cplx w) { return std::exp(Q(w)); },
                                  A, B, o);
  const double k = 1.0 / (4.0 * pi * pi);
  r.value *= -k;
  r.error *= k;
  return r;
}

/// Sigma: vertex +delta, rays at -+angle. Gamma: vertex -delta, rays at -+(pi - angle).
inline std::pair<Contour, Contour> airy_contours(const CauchyPhases& ph, const DirectGeometry& g, double budget) {
  const double th = g.ray_angle;
  Contour A = truncate_rays({{g.delta, expi(-th), true}, {g.delta, expi(th), false}}, real_part_of(ph.P), budget,
                            g.delta);
  Contour B = truncate_rays({{-g.delta, expi(-(pi - th)), true}, {-g.delta, expi(pi - th), false}},
                            real_part_of(ph.Q), budget, g.delta);
  return {std::move(A), std::move(B)};
}

/// Vertical zeta line through +delta. The omega contour is a right V at +2 delta
/// (in along +angle, out along -angle) and a left V at -delta.
inline std::pair<Contour, Contour> pearcey_contours(const CauchyPhases& ph, const DirectGeometry& g,
                                                    double budget) {
  const double th = g.ray_angle;
  Contour A = truncate_rays({{g.delta, cplx(0, -1), true}, {g.delta, cplx(0, 1), false}}, real_part_of(ph.P),
                            budget, g.delta);
  Contour B = truncate_rays({{2.0 * g.delta, expi(th), true},
                             {2.0 * g.delta, expi(-th), false},
                             {-g.delta, expi(-3.0 * pi / 4), true},
                             {-g.delta, expi(3.0 * pi / 4), false}},
                            real_part_of(ph.Q), budget, g.delta);
  return {std::move(A), std::move(B)};
}

inline Contour segment_contour(cplx a, cplx b, int panels = 4) {
  Contour c;
  for (int k = 0; k < panels; ++k)
    c.append(segment_panel(a + (b - a) * (double(k) / panels), a + (b - a) * (double(k + 1) / panels)), k == 0);
  return c;
}

/// (1/(2 pi i)) int_a^b exp(dt w^2 + dx w) dw minus the four-pi heat term.
inline KernelValue segment_kernel(cplx a, cplx b, double dt, double dx, const QuadOptions& o) {
  const QuadResult r =
      integrate_single([&](cplx w) { return std::exp(dt * w * w + dx * w); }, segment_contour(a, b), o);
  return make_value(r.value / (2.0 * pi * I) - heat_term(dt, dx, Variance::four_pi), r.error / (2.0 * pi),
                    r.converged, Backend::direct);
}

/// The four half-paths of the crossed geometry: S and T each run through the
/// lower saddle and then the upper one.
struct SaddleGeometry {
  std::shared_ptr<const SteepestPath> s_lo, s_hi, t_lo, t_hi;
};

inline const SaddleGeometry& airy_saddle_geometry() {
  static const SaddleGeometry g = [] {
    const Polynomial f({0.0, 1.0, 0.0, 1.0 / 3.0});
    const cplx up = I, down = -I;
    return SaddleGeometry{std::make_shared<SteepestPath>(f, down, -1, expi(3 * pi / 4), 40.0),
                          std::make_shared<SteepestPath>(f, up, -1, expi(pi / 4), 40.0),
                          std::make_shared<SteepestPath>(f, down, 1, expi(pi / 4), 40.0),
                          std::make_shared<SteepestPath>(f, up, 1, expi(3 * pi / 4), 40.0)};
  }();
  return g;
}

inline const SaddleGeometry& pearcey_saddle_geometry() {
  static const SaddleGeometry g = [] {
    const Polynomial f({0.0, 1.0, 0.0, 0.0, 0.25});
    const double r = std::sqrt(2.0 / 3.0);
    const cplx up = expi(pi / 3), down = expi(-pi / 3);
    return SaddleGeometry{std::make_shared<SteepestPath>(f, down, 1, r * expi(pi / 3), 40.0),
                          std::make_shared<SteepestPath>(f, up, 1, r * expi(2 * pi / 3), 40.0),
                          std::make_shared<SteepestPath>(f, down, -1, r * expi(-pi / 6), 40.0),
                          std::make_shared<SteepestPath>(f, up, -1, r * expi(7 * pi / 6), 40.0)};
  }();
  return g;
}

/// Two steepest half-paths joined at infinity, each clipped where Re E drops by
/// `budget` below its maximum along the path.
inline Contour crossed_contour(const std::shared_ptr<const SteepestPath>& lo,
                               const std::shared_ptr<const SteepestPath>& hi, const Polynomial& E, double budget,
                               double first) {
  Contour c;
  for (const auto& path : {lo, hi}) {
    auto env = [&](double x) { return E(path->eval(x).first).real(); };
    const double x_hi = truncation_radius([&](double r) { return env(r); }, budget, path->x_max());
    const double x_lo = -truncation_radius([&](double r) { return env(-r); }, budget, path->x_max());
    append_steepest(c, path, x_lo, x_hi, std::min(first, 0.5 * std::min(x_hi, -x_lo)), true);
    c.crossings.push_back(path->center());
  }
  return c;
}

inline QuadResult crossed_integral(const SaddleGeometry& g, const CauchyPhases& ph, double A,
                                   const QuadOptions& o) {
  const double first = std::min(0.5, 1.0 / std::sqrt(A));
  const Contour S = crossed_contour(g.s_lo, g.s_hi, ph.P, o.ray_truncation_budget, first);
  Contour T = crossed_contour(g.t_lo, g.t_hi, ph.Q, o.ray_truncation_budget, first);
  T.crossings.clear();
  return cauchy_exp(ph, S, T, o);
}

inline double airy_delta(double a) { return 0.25 / std::sqrt(a); }
inline double pearcey_delta(double a) { return 0.25 / std::cbrt(a); }
inline constexpr double airy_scaled_angle = 5.0 * pi / 12.0;
inline constexpr double pearcey_scaled_angle = pi / 3.0;
inline constexpr double transition_angle = 7.0 * pi / 48.0;

} // namespace detail

inline KernelValue sine_ext_kernel(double tau1, double tau2, double u, double v, const QuadOptions& o = {}) {
  const double dt = tau1 - tau2, dx = u - v;
  const QuadResult r = integrate_single([&](cplx w) { return std::exp(-0.5 * dt * w * w + I * dx * w); },
                                        detail::segment_contour(-pi, pi), o);
  return detail::make_value(r.value / (2.0 * pi) - heat_term(dt, dx, Variance::two_pi), r.error / (2.0 * pi),
                            r.converged, Backend::direct);
}

inline KernelValue s1_kernel(double tau1, double tau2, double u, double v, const QuadOptions& o = {}) {
  return detail::segment_kernel(-I, I, tau1 - tau2, u - v, o);
}

inline KernelValue s2_kernel(double tau1, double tau2, double u, double v, const QuadOptions& o = {}) {
  return detail::segment_kernel(expi(-pi / 3), expi(pi / 3), tau1 - tau2, u - v, o);
}

/// a^{-1/2} K^Ai_{tau1/a, tau2/a}(u/sqrt(a) - a, v/sqrt(a) - a).
///
/// The saddle backend deforms onto the crossed steepest paths through +-i and
/// adds back the residue contribution, which is the S1 kernel.
inline KernelValue rescaled_airy_lhs(double a, double tau1, double tau2, double u, double v,
                                     Backend backend = Backend::direct, const QuadOptions& o = {}) {
  if (!(a > 0))
    throw UsageError("rescaled_airy_lhs: a must be positive");
  o.validate();
  const CauchyPhases ph = rescaled_airy_phases(a, tau1, tau2, u, v);
  if (backend == Backend::direct) {
    const auto [A, B] = detail::airy_contours(ph, {detail::airy_delta(a), detail::airy_scaled_angle},
                                              o.ray_truncation_budget);
    const QuadResult r = detail::cauchy_exp(ph, A, B, o);
    return detail::make_value(r.value - heat_term(tau1 - tau2, u - v, Variance::four_pi), r.error, r.converged,
                              Backend::direct);
  }
  const QuadResult J = detail::crossed_integral(detail::airy_saddle_geometry(), ph, std::pow(a, 1.5), o);
  const KernelValue k = s1_kernel(tau1, tau2, u, v, o);
  return detail::make_value(k.value + J.value, k.error_estimate + J.error, k.converged && J.converged,
                            Backend::saddle);
}

/// a^{-1/3} K^P_{2 tau1/a^{2/3}, 2 tau2/a^{2/3}}(u/a^{1/3} + a, v/a^{1/3} + a).
///
/// The saddle backend runs through e^{+-i pi/3}; the residue part is the S2 kernel.
inline KernelValue rescaled_pearcey_lhs(double a, double tau1, double tau2, double u, double v,
                                        Backend backend = Backend::direct, const QuadOptions& o = {}) {
  if (!(a > 0))
    throw UsageError("rescaled_pearcey_lhs: a must be positive");
  o.validate();
  const CauchyPhases ph = rescaled_pearcey_phases(a, tau1, tau2, u, v);
  if (backend == Backend::direct) {
    const auto [A, B] = detail::pearcey_contours(ph, {detail::pearcey_delta(a), detail::pearcey_scaled_angle},
                                                 o.ray_truncation_budget);
    const QuadResult r = detail::cauchy_exp(ph, A, B, o);
    return detail::make_value(r.value - heat_term(tau1 - tau2, u - v, Variance::four_pi), r.error, r.converged,
                              Backend::direct);
  }
  const QuadResult J = detail::crossed_integral(detail::pearcey_saddle_geometry(), ph, std::pow(a, 4.0 / 3.0), o);
  const KernelValue k = s2_kernel(tau1, tau2, u, v, o);
  return detail::make_value(k.value + J.value, k.error_estimate + J.error, k.converged && J.converged,
                            Backend::saddle);
}

inline KernelValue eval_kernel(const KernelQuery& q) {
  q.validate();
  const auto& o = q.opts;
  switch (q.kernel) {
  case KernelId::sine_ext: return sine_ext_kernel(q.tau1, q.tau2, q.u, q.v, o);
  case KernelId::s1: return s1_kernel(q.tau1, q.tau2, q.u, q.v, o);
  case KernelId::s2: return s2_kernel(q.tau1, q.tau2, q.u, q.v, o);
  case KernelId::airy_ext: {
    if (q.backend == Backend::saddle)
      return rescaled_airy_lhs(1.0, q.tau1, q.tau2, q.u + 1.0, q.v + 1.0, Backend::saddle, o);
    const CauchyPhases ph = airy_phases(q.tau1, q.tau2, q.u, q.v);
    const auto [A, B] = detail::airy_contours(ph, {}, o.ray_truncation_budget);
    const QuadResult r = detail::cauchy_exp(ph, A, B, o);
    return detail::make_value(r.value - heat_term(q.tau1 - q.tau2, q.u - q.v, Variance::four_pi), r.error,
                              r.converged, Backend::direct);
  }
  case KernelId::pearcey_ext: {
    if (q.backend == Backend::saddle)
      return rescaled_pearcey_lhs(1.0, q.tau1 / 2.0, q.tau2 / 2.0, q.u - 1.0, q.v - 1.0, Backend::saddle, o);
    const CauchyPhases ph = pearcey_phases(q.tau1, q.tau2, q.u, q.v);
    const auto [A, B] = detail::pearcey_contours(ph, {0.25, pi / 4}, o.ray_truncation_budget);
    const QuadResult r = detail::cauchy_exp(ph, A, B, o);
    return detail::make_value(r.value - heat_term(q.tau1 - q.tau2, q.u - q.v, Variance::two_pi), r.error,
                              r.converged, Backend::direct);
  }
  case KernelId::transition: {
    const CauchyPhases ph = transition_phases(*q.a_param, q.tau1, q.tau2, q.u, q.v);
    const auto [A, B] = detail::pearcey_contours(ph, {0.25, detail::transition_angle}, o.ray_truncation_budget);
    const QuadResult r = detail::cauchy_exp(ph, A, B, o);
    return detail::make_value(r.value - heat_term(q.tau1 - q.tau2, q.u - q.v, Variance::two_pi), r.error,
                              r.converged, Backend::direct);
  }
  }
  throw UsageError("unknown kernel");
}

inline KernelValue eval_kernel(KernelId k, double tau1, double tau2, double u, double v,
                               Backend backend = Backend::direct, const QuadOptions& o = {},
                               std::optional<double> a_param = std::nullopt) {
  KernelQuery q;
  q.kernel = k;
  q.tau1 = tau1;
  q.tau2 = tau2;
  q.u = u;
  q.v = v;
  q.backend = backend;
  q.opts = o;
  q.a_param = a_param;
  return eval_kernel(q);
}

/// (pi K^{S1}_{pi^2 tau1/2, pi^2 tau2/2}(pi u, pi v), K^sine_{tau1,tau2}(u, v)).
inline std::pair<KernelValue, KernelValue> relation_connS(double tau1, double tau2, double u, double v,
                                                          const QuadOptions& o = {}) {
  const double h = pi * pi / 2.0;
  KernelValue lhs = s1_kernel(h * tau1, h * tau2, pi * u, pi * v, o);
  lhs.value *= pi;
  lhs.error_estimate *= pi;
  lhs.imag_residual = std::abs(lhs.value.imag());
  return {lhs, sine_ext_kernel(tau1, tau2, u, v, o)};
}

/// Gauged and rescaled S2 kernel against the S1 kernel.
inline std::pair<KernelValue, KernelValue> relation_connSS(double tau1, double tau2, double u, double v,
                                                           const QuadOptions& o = {}) {
  const double c = 2.0 / std::sqrt(3.0);
  const double gauge = c * std::exp((tau1 - tau2) / 3.0 - (u - v) / std::sqrt(3.0));
  KernelValue lhs =
      s2_kernel(4.0 * tau1 / 3.0, 4.0 * tau2 / 3.0, c * u - 4.0 * tau1 / 3.0, c * v - 4.0 * tau2 / 3.0, o);
  lhs.value *= gauge;
  lhs.error_estimate *= gauge;
  lhs.imag_residual = std::abs(lhs.value.imag());
  return {lhs, s1_kernel(tau1, tau2, u, v, o)};
}

/// (a^{1/3} K^a_{2 a^{2/3} tau1, 2 a^{2/3} tau2}(a^{1/3} u, a^{1/3} v), K^Ai_{tau1,tau2}(u, v)).
inline std::pair<KernelValue, KernelValue> transition_interpolation_check(double a, double tau1, double tau2,
                                                                          double u, double v,
                                                                          const QuadOptions& o = {}) {
  if (!(a >= 0))
    throw UsageError("transition_interpolation_check: a must be >= 0");
  const double c = std::cbrt(a), c2 = c * c;
  KernelValue lhs =
      eval_kernel(KernelId::transition, 2.0 * c2 * tau1, 2.0 * c2 * tau2, c * u, c * v, Backend::direct, o, a);
  lhs.value *= c;
  lhs.error_estimate *= c;
  lhs.imag_residual = std::abs(lhs.value.imag());
  return {lhs, eval_kernel(KernelId::airy_ext, tau1, tau2, u, v, Backend::direct, o)};
}

} // namespace kernelwave
