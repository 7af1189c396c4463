#pragma once

#include <array>
#include <vector>

#include "common.hpp"
#include "polynomial.hpp"
#include "series.hpp"

namespace kernelwave {

enum class PhaseKind { airy_cubic, pearcey_quartic, custom_polynomial };

/// Polynomial phase f with its simple saddles and the values f takes there.
struct PhaseSpec {
  PhaseKind kind = PhaseKind::custom_polynomial;
  Polynomial f;
  std::vector<cplx> saddles;
  std::vector<cplx> levels;
};

/// Phase for an arbitrary polynomial; saddles are the simple zeros of f'.
inline PhaseSpec make_phase(const Polynomial& f) {
  PhaseSpec p;
  p.kind = PhaseKind::custom_polynomial;
  p.f = f;
  const Polynomial d1 = f.derivative();
  const Polynomial d2 = d1.derivative();
  for (cplx z : d1.roots()) {
    if (std::abs(d2(z)) < 1e-10)
      continue;
    p.saddles.push_back(z);
    p.levels.push_back(f(z));
  }
  return p;
}

inline PhaseSpec make_phase(PhaseKind kind) {
  PhaseSpec p;
  p.kind = kind;
  switch (kind) {
  case PhaseKind::airy_cubic:
    p.f = Polynomial({0.0, 1.0, 0.0, 1.0 / 3.0});
    p.saddles = {I, -I};
    break;
  case PhaseKind::pearcey_quartic:
    p.f = Polynomial({0.0, 1.0, 0.0, 0.0, 0.25});
    p.saddles = {expi(pi / 3), expi(-pi / 3), -1.0};
    break;
  case PhaseKind::custom_polynomial:
    throw UsageError("make_phase: a custom phase needs its polynomial");
  }
  for (cplx s : p.saddles)
    p.levels.push_back(p.f(s));
  return p;
}

inline Series1 solve_branch(const PhaseSpec& phase, cplx center, int rhs_sign, cplx level,
                            cplx first_coeff, int order) {
  return solve_branch(phase.f, center, rhs_sign, level, first_coeff, order);
}

/// Which function a trace descends: f itself or -f.
enum class DescentOf { f, minus_f };

struct PathPolyline {
  std::vector<cplx> points;
  std::vector<double> arc_params;
  int saddle_index = 0;
  DescentOf descent_of = DescentOf::f;
  int ray_selector = 0;
};

struct TraceOptions {
  double max_arclength = 12.0;
  double step_tol = 1e-10;
  double launch_offset = 1e-4;
  double decay_budget = 60.0;
  double max_step = 0.05;
};

/// Unit directions of steepest descent of sigma*f at a simple saddle, from the quadratic model.
inline std::array<cplx, 2> descent_directions(const PhaseSpec& phase, int saddle_index, DescentOf which) {
  const cplx s = phase.saddles.at(saddle_index);
  const double sigma = which == DescentOf::f ? 1.0 : -1.0;
  const cplx c2 = sigma * phase.f.derivative().derivative()(s) / 2.0;
  if (std::abs(c2) < 1e-14)
    throw DegenerateSaddleError("descent_directions: saddle is not simple");
  cplx d = std::sqrt(-1.0 / c2);
  d /= std::abs(d);
  return {d, -d};
}

/// Follows the steepest-descent ray of sigma*f leaving a saddle.
///
/// RK4 on z' = -conj(h'(z))/|h'(z)| with step doubling for error control, then a
/// Newton projection back onto the level curve Im h = Im h(saddle) after every step.
inline PathPolyline trace_steepest(const PhaseSpec& phase, int saddle_index, DescentOf which,
                                   int ray_selector, const TraceOptions& opts = {}) {
  if (saddle_index < 0 || saddle_index >= static_cast<int>(phase.saddles.size()))
    throw UsageError("trace_steepest: saddle index out of range");
  if (ray_selector != 0 && ray_selector != 1)
    throw UsageError("trace_steepest: ray_selector must be 0 or 1");
  if (!(opts.max_arclength > 0))
    throw UsageError("trace_steepest: max_arclength must be positive");

  const double sigma = which == DescentOf::f ? 1.0 : -1.0;
  const Polynomial h = phase.f * sigma;
  const Polynomial dh = h.derivative();
  const cplx s = phase.saddles[saddle_index];
  const cplx hs = h(s);
  const double target = hs.imag();

  auto field = [&](cplx z) {
    const cplx d = dh(z);
    const double n = std::abs(d);
    if (n < 1e-300)
      throw TraceError("trace_steepest: reached a stationary point");
    return -std::conj(d) / n;
  };
  auto rk4 = [&](cplx z, double step) {
    const cplx k1 = field(z);
    const cplx k2 = field(z + 0.5 * step * k1);
    const cplx k3 = field(z + 0.5 * step * k2);
    const cplx k4 = field(z + step * k3);
    return z + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto project = [&](cplx z) {
    for (int it = 0; it < 20; ++it) {
      const auto [hv, d] = h.eval_d1(z);
      const double miss = hv.imag() - target;
      const double n2 = std::norm(d);
      if (n2 == 0.0)
        break;
      const cplx dz = miss * I * std::conj(d) / n2;
      z -= dz;
      if (std::abs(dz) < 1e-16 * std::max(1.0, std::abs(z)))
        break;
    }
    return z;
  };

  PathPolyline path;
  path.saddle_index = saddle_index;
  path.descent_of = which;
  path.ray_selector = ray_selector;
  path.points.push_back(s);
  path.arc_params.push_back(0.0);

  const cplx dir = descent_directions(phase, saddle_index, which)[ray_selector];
  cplx z = project(s + opts.launch_offset * dir);
  double arc = std::abs(z - s);
  path.points.push_back(z);
  path.arc_params.push_back(arc);

  double step = std::min(1e-3, opts.max_step);
  const double min_step = 1e-12;
  while (arc < opts.max_arclength) {
    if (hs.real() - h(z).real() > opts.decay_budget)
      break;
    step = std::min(step, opts.max_arclength - arc);
    const cplx full = rk4(z, step);
    const cplx half = rk4(rk4(z, 0.5 * step), 0.5 * step);
    const double err = std::abs(full - half);
    if (err > opts.step_tol * std::max(1.0, std::abs(z)) && step > min_step) {
      step *= 0.5;
      if (step <= min_step)
        throw TraceError("trace_steepest: step size underflow near a stationary point");
      continue;
    }
    const cplx next = project(half);
    arc += std::abs(next - z);
    z = next;
    path.points.push_back(z);
    path.arc_params.push_back(arc);
    if (err < 0.1 * opts.step_tol)
      step = std::min(step * 1.5, opts.max_step);
  }
  return path;
}

struct Window {
  double x0, x1, y0, y1;
};

/// Points of the zero set Im f = Im level inside a window, found by linear
/// interpolation along the edges of a resolution x resolution grid.
inline std::vector<cplx> export_level_curve(const PhaseSpec& phase, cplx level, const Window& w,
                                            int resolution) {
  if (resolution < 2)
    throw UsageError("export_level_curve: resolution must be at least 2");
  const int n = resolution;
  const double hx = (w.x1 - w.x0) / (n - 1);
  const double hy = (w.y1 - w.y0) / (n - 1);
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  auto at = [&](int i, int j) -> double& { return g[static_cast<std::size_t>(j) * n + i]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      at(i, j) = phase.f(cplx(w.x0 + i * hx, w.y0 + j * hy)).imag() - level.imag();

  std::vector<cplx> cloud;
  auto edge = [&](int i0, int j0, int i1, int j1) {
    const double a = at(i0, j0), b = at(i1, j1);
    if (a == 0.0) {
      cloud.emplace_back(w.x0 + i0 * hx, w.y0 + j0 * hy);
      return;
    }
    if ((a < 0.0) == (b < 0.0) || b == 0.0)
      return;
    const double t = a / (a - b);
    cloud.emplace_back(w.x0 + (i0 + t * (i1 - i0)) * hx, w.y0 + (j0 + t * (j1 - j0)) * hy);
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n)
        edge(i, j, i + 1, j);
      if (j + 1 < n)
        edge(i, j, i, j + 1);
    }
  return cloud;
}

/// Exact parameterization of a full steepest path through a simple saddle:
/// f(z(x)) = level + sign * x^2 for real x.
///
/// Near the saddle z(x) comes from the branch series; farther out from Newton's
/// method on f(z) = level + sign x^2, seeded from a continuation table.
class SteepestPath {
public:
  SteepestPath(const Polynomial& f, cplx center, int sign, cplx first_coeff, double x_max = 16.0,
               int series_order = 40)
      : f_(f), df_(f.derivative()), center_(center), level_(f(center)), sign_(sign),
        g_(solve_branch(f, center, sign, f(center), first_coeff, series_order)),
        dg_(derivative(g_)), x_max_(x_max) {
    double radius = 1e300;
    for (int n = series_order / 2; n <= series_order; ++n)
      if (std::abs(g_[n]) > 0.0)
        radius = std::min(radius, std::pow(std::abs(g_[n]), -1.0 / n));
    series_reach_ = 0.35 * std::min(radius, 10.0);
    step_ = series_reach_ / 4.0;
    build_table(1.0, table_pos_);
    build_table(-1.0, table_neg_);
  }

  cplx center() const { return center_; }
  cplx level() const { return level_; }
  int sign() const { return sign_; }
  const Series1& branch() const { return g_; }
  double x_max() const { return x_max_; }

  /// z(x) and dz/dx.
  std::pair<cplx, cplx> eval(double x) const {
    if (std::abs(x) <= series_reach_)
      return {g_(x), dg_(x)};
    if (std::abs(x) > x_max_)
      throw GeometryError("SteepestPath: parameter beyond the tabulated range");
    const auto& table = x > 0 ? table_pos_ : table_neg_;
    const double ax = std::abs(x);
    std::size_t k = static_cast<std::size_t>((ax - series_reach_) / step_);
    k = std::min(k, table.size() - 1);
    const double xk = (x > 0 ? 1.0 : -1.0) * (series_reach_ + k * step_);
    const cplx zk = table[k];
    cplx z = zk + slope(xk, zk) * (x - xk);
    z = newton(z, x);
    return {z, slope(x, z)};
  }

private:
  cplx slope(double x, cplx z) const { return 2.0 * sign_ * x / df_(z); }

  cplx newton(cplx z, double x) const {
    const cplx target = level_ + static_cast<double>(sign_) * x * x;
    for (int it = 0; it < 30; ++it) {
      const auto [fz, dfz] = f_.eval_d1(z);
      const cplx dz = (fz - target) / dfz;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::abs(z))
        break;
    }
    return z;
  }

  void build_table(double dir, std::vector<cplx>& table) {
    double x = dir * series_reach_;
    cplx z = g_(x);
    table.push_back(z);
    while (std::abs(x) < x_max_ + step_) {
      const double xn = x + dir * step_;
      cplx pred = z + slope(x, z) * (xn - x);
      // midpoint predictor keeps the Newton seed on the right sheet
      const double xm = 0.5 * (x + xn);
      pred = z + slope(xm, z + slope(x, z) * (xm - x)) * (xn - x);
      z = newton(pred, xn);
      x = xn;
      table.push_back(z);
    }
  }

  Polynomial f_, df_;
  cplx center_, level_;
  int sign_;
  Series1 g_, dg_;
  double x_max_;
  double series_reach_ = 0.0, step_ = 0.0;
  std::vector<cplx> table_pos_, table_neg_;
};

} // namespace kernelwave
