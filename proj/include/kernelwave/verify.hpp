#pragma once

#include <optional>
#include <string>
#include <vector>

#include "expansion.hpp"
#include "parallel.hpp"

namespace kernelwave {

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  int points = 0;
};

/// Ordinary least squares of log y on log x over the points with finite positive y.
inline SlopeFit fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw FitError("fit_loglog_slope: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] > 0 && ys[i] > 0 && std::isfinite(ys[i])) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  const std::size_t n = lx.size();
  if (n < 3)
    throw FitError("fit_loglog_slope: fewer than 3 usable points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0))
    throw FitError("fit_loglog_slope: abscissae coincide");
  SlopeFit f;
  f.slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - my - f.slope * (lx[i] - mx);
    ssr += r * r;
  }
  f.stderr_ = std::sqrt(ssr / (n - 2) / sxx);
  f.points = static_cast<int>(n);
  return f;
}

enum class FitMode {
  /// Plain fit, switching to max_phase when its standard error exceeds 0.2.
  automatic,
  plain,
  /// Root mean square over one period of the oscillating phase.
  rms_phase,
  /// Maximum over one period of the oscillating phase.
  max_phase,
};

inline std::string to_string(FitMode m) {
  switch (m) {
  case FitMode::automatic: return "auto";
  case FitMode::plain: return "plain";
  case FitMode::rms_phase: return "rms-phase";
  case FitMode::max_phase: return "max-phase";
  }
  return "?";
}

inline FitMode parse_fit_mode(const std::string& s) {
  for (FitMode m : {FitMode::automatic, FitMode::plain, FitMode::rms_phase, FitMode::max_phase})
    if (s == to_string(m))
      return m;
  throw UsageError("unknown fit mode '" + s + "'");
}

struct StudyOptions {
  FitMode fit = FitMode::automatic;
  int phase_samples = 12;
  double noise_factor = 100.0;
  double stderr_switch = 0.2;
  unsigned threads = thread_count();
};

struct ResidualTable {
  Transition transition = Transition::airy_to_s1;
  Point point;
  std::vector<double> a_values;
  /// residuals[N][i] at a_values[i], with quadrature error bounds alongside.
  std::vector<std::vector<double>> residuals, errors;
  /// Phase-averaged residuals, filled for the orders where they were fitted.
  std::vector<std::vector<double>> envelopes;
  std::vector<double> slopes, slope_ci;
  std::vector<FitMode> fit_used;
};

namespace detail {

/// a' whose oscillation phase differs from that at a by dtheta.
inline double advance_phase(Transition t, double a, double dtheta) {
  if (t == Transition::airy_to_s1)
    return std::pow(std::pow(a, 1.5) + 0.75 * dtheta, 2.0 / 3.0);
  return std::pow(std::pow(a, 4.0 / 3.0) + 4.0 * dtheta / (3.0 * std::sqrt(3.0)), 0.75);
}

struct ResidualCell {
  double a = 0.0;
  std::vector<double> residual, error;
};

inline ResidualCell residual_cell(const ExpansionCoefficients& ec, int N_max, double a, Backend b,
                                  const QuadOptions& o) {
  const KernelValue lhs = rescaled_lhs(ec.transition, a, ec.at_point, b, o);
  const KernelValue lead = leading_kernel(ec.transition, ec.at_point, o);
  ResidualCell cell;
  cell.a = a;
  double s = lead.value.real();
  for (int N = 0; N <= N_max; ++N) {
    if (N > 0)
      s += expansion_term(ec, N, a);
    cell.residual.push_back(std::abs(lhs.value.real() - s));
    cell.error.push_back(lhs.error_estimate + lead.error_estimate + lhs.imag_residual);
  }
  return cell;
}

} // namespace detail

/// Residuals of the N-term expansion against the rescaled kernel and their
/// fitted decay exponents in a.
inline ResidualTable residual_study(Transition t, const Point& p, const std::vector<double>& a_values, int N_max,
                                    Backend backend = Backend::direct, const QuadOptions& o = {},
                                    const StudyOptions& so = {}) {
  if (N_max < 0)
    throw UsageError("residual_study: N_max must be nonnegative");
  if (a_values.size() < 3)
    throw UsageError("residual_study: need at least 3 values of a");
  for (std::size_t i = 0; i < a_values.size(); ++i)
    if (!(a_values[i] > 0) || (i > 0 && !(a_values[i] > a_values[i - 1])))
      throw UsageError("residual_study: a values must be positive and strictly increasing");
  if (so.phase_samples < 1)
    throw UsageError("residual_study: phase_samples must be positive");

  const ExpansionCoefficients ec = build_amplitudes(t, p, required_order(N_max));
  const std::size_t na = a_values.size();
  const bool any_envelope = so.fit != FitMode::plain;
  const std::size_t ns = any_envelope ? static_cast<std::size_t>(so.phase_samples) : 1;

  // cells[i * ns + j]: phase samples spread over one period centred on a_values[i];
  // j = 0 is a itself
  std::vector<detail::ResidualCell> cells(na * ns);
  parallel_for(
      cells.size(),
      [&](std::size_t idx) {
        const std::size_t i = idx / ns, j = idx % ns;
        const double shift = 2.0 * pi * (j < (ns + 1) / 2 ? double(j) : double(j) - double(ns)) / ns;
        const double a = detail::advance_phase(t, a_values[i], shift);
        cells[idx] = detail::residual_cell(ec, N_max, a, backend, o);
      },
      so.threads);

  ResidualTable tab;
  tab.transition = t;
  tab.point = p;
  tab.a_values = a_values;
  for (int N = 0; N <= N_max; ++N) {
    std::vector<double> res, err, env(na, 0.0);
    for (std::size_t i = 0; i < na; ++i) {
      res.push_back(cells[i * ns].residual[N]);
      err.push_back(cells[i * ns].error[N]);
    }
    auto guarded = [&](const std::vector<double>& ys, const std::vector<double>& floor) {
      std::vector<double> xs, vs;
      for (std::size_t i = 0; i < na; ++i)
        if (ys[i] > so.noise_factor * floor[i]) {
          xs.push_back(a_values[i]);
          vs.push_back(ys[i]);
        }
      if (xs.size() < 3)
        throw InsufficientPrecisionError("residual_study: residuals for N = " + std::to_string(N) +
                                         " sit at the quadrature noise floor; use the saddle backend");
      return fit_loglog_slope(xs, vs);
    };
    FitMode used = so.fit == FitMode::automatic ? FitMode::plain : so.fit;
    SlopeFit fit;
    if (used == FitMode::plain) {
      fit = guarded(res, err);
      if (so.fit == FitMode::automatic && fit.stderr_ > so.stderr_switch)
        used = FitMode::max_phase;
    }
    if (used != FitMode::plain) {
      // Samples across the window are first brought back to a_values[i] with the
      // current slope estimate; the estimate is iterated to a fixed point.
      std::vector<double> floor(na, 0.0);
      auto envelope = [&](double s) {
        for (std::size_t i = 0; i < na; ++i) {
          double acc = 0.0;
          floor[i] = 0.0;
          for (std::size_t j = 0; j < ns; ++j) {
            const double scale = std::pow(a_values[i] / cells[i * ns + j].a, s);
            const double r = cells[i * ns + j].residual[N] * scale;
            acc = used == FitMode::rms_phase ? acc + r * r : std::max(acc, r);
            floor[i] = std::max(floor[i], cells[i * ns + j].error[N] * scale);
          }
          env[i] = used == FitMode::rms_phase ? std::sqrt(acc / ns) : acc;
        }
        return guarded(env, floor);
      };
      fit = envelope(0.0);
      for (int it = 0; it < 50; ++it) {
        const SlopeFit next = envelope(fit.slope);
        const bool done = std::abs(next.slope - fit.slope) < 1e-9;
        fit = next;
        if (done)
          break;
      }
    }
    tab.residuals.push_back(std::move(res));
    tab.errors.push_back(std::move(err));
    tab.envelopes.push_back(used == FitMode::plain ? std::vector<double>{} : std::move(env));
    tab.slopes.push_back(fit.slope);
    tab.slope_ci.push_back(fit.stderr_);
    tab.fit_used.push_back(used);
  }
  return tab;
}

/// Acceptance window for the fitted exponent, if one is defined for this order.
inline std::optional<std::pair<double, double>> slope_window(Transition t, int N) {
  if (t == Transition::airy_to_s1) {
    if (N == 0) return std::pair{-1.7, -1.3};
    if (N == 1) return std::pair{-3.35, -2.65};
    if (N == 2) return std::pair{-4.9, -4.1};
  } else {
    if (N == 0) return std::pair{-1.55, -1.15};
    if (N == 1) return std::pair{-3.0, -2.35};
  }
  return std::nullopt;
}

inline const std::vector<double>& default_a_grid() {
  static const std::vector<double> g{4.0, 5.5, 7.0, 8.5, 10.0, 12.0, 14.0};
  return g;
}

/// Fixed sample of [-1,1]^4, (u, v, tau1, tau2).
inline const std::vector<Point>& default_points() {
  static const std::vector<Point> p{{0.3, -0.2, 0.1, 0.05}, {-0.6, 0.4, -0.3, 0.5}, {0.8, 0.7, 0.6, -0.4}};
  return p;
}

struct CrossRow {
  std::string label;
  KernelValue first, second;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool flagged = false;
};

namespace detail {

inline CrossRow cross_row(std::string label, const KernelValue& x, const KernelValue& y, double floor) {
  CrossRow r{std::move(label), x, y};
  r.discrepancy = std::abs(x.value - y.value);
  r.tolerance = std::max(floor, 10.0 * (x.error_estimate + y.error_estimate));
  r.flagged = !(r.discrepancy <= r.tolerance);
  return r;
}

inline std::string describe(const KernelQuery& q) {
  std::string s = to_string(q.kernel) + " tau1=" + std::to_string(q.tau1) + " tau2=" + std::to_string(q.tau2) +
                  " u=" + std::to_string(q.u) + " v=" + std::to_string(q.v);
  if (q.a_param)
    s += " a=" + std::to_string(*q.a_param);
  return s;
}

} // namespace detail

/// DIRECT against SADDLE for each query. Kernels without a crossed geometry
/// are compared against the identity that pins them down instead: the
/// transition kernel at a = 0 against pearcey-ext, s1 and sine-ext through
/// connS, s2 through connSS.
inline std::vector<CrossRow> cross_validate(const std::vector<KernelQuery>& queries, double floor = 1e-8,
                                            unsigned threads = thread_count()) {
  std::vector<CrossRow> rows(queries.size());
  parallel_for(
      queries.size(),
      [&](std::size_t i) {
        KernelQuery q = queries[i];
        q.validate();
        const std::string label = detail::describe(q);
        switch (q.kernel) {
        case KernelId::airy_ext:
        case KernelId::pearcey_ext: {
          q.backend = Backend::direct;
          const KernelValue d = eval_kernel(q);
          q.backend = Backend::saddle;
          rows[i] = detail::cross_row(label, d, eval_kernel(q), floor);
          break;
        }
        case KernelId::transition: {
          if (*q.a_param != 0.0)
            throw UsageError("cross_validate: the transition kernel has a reference only at a = 0");
          const KernelValue p = eval_kernel(KernelId::pearcey_ext, q.tau1, q.tau2, q.u, q.v, Backend::direct, q.opts);
          rows[i] = detail::cross_row(label, eval_kernel(q), p, floor);
          break;
        }
        case KernelId::sine_ext: {
          const auto [l, r] = relation_connS(q.tau1, q.tau2, q.u, q.v, q.opts);
          rows[i] = detail::cross_row(label, r, l, floor);
          break;
        }
        case KernelId::s1: {
          const auto [l, r] = relation_connSS(q.tau1, q.tau2, q.u, q.v, q.opts);
          rows[i] = detail::cross_row(label, r, l, floor);
          break;
        }
        case KernelId::s2: {
          // inverse of the connSS substitution
          const double c = std::sqrt(3.0) / 2.0;
          const double t1 = 0.75 * q.tau1, t2 = 0.75 * q.tau2;
          const auto [l, r] = relation_connSS(t1, t2, c * (q.u + q.tau1), c * (q.v + q.tau2), q.opts);
          const double gauge = 2.0 / std::sqrt(3.0) * std::exp((t1 - t2) / 3.0 - c * (q.u + q.tau1 - q.v - q.tau2) / std::sqrt(3.0));
          KernelValue back = r;
          back.value /= gauge;
          back.error_estimate /= gauge;
          rows[i] = detail::cross_row(label, eval_kernel(q), back, floor);
          break;
        }
        }
      },
      threads);
  return rows;
}

/// DIRECT against SADDLE on the rescaled left-hand sides.
inline std::vector<CrossRow> cross_validate_lhs(Transition t, const std::vector<Point>& points,
                                                const std::vector<double>& a_values, const QuadOptions& o = {},
                                                double floor = 1e-8, unsigned threads = thread_count()) {
  std::vector<CrossRow> rows(points.size() * a_values.size());
  parallel_for(
      rows.size(),
      [&](std::size_t idx) {
        const Point& p = points[idx / a_values.size()];
        const double a = a_values[idx % a_values.size()];
        const std::string label = to_string(t) + " a=" + std::to_string(a) + " u=" + std::to_string(p.u) +
                                  " v=" + std::to_string(p.v) + " tau1=" + std::to_string(p.tau1) +
                                  " tau2=" + std::to_string(p.tau2);
        rows[idx] = detail::cross_row(label, rescaled_lhs(t, a, p, Backend::direct, o),
                                      rescaled_lhs(t, a, p, Backend::saddle, o), floor);
      },
      threads);
  return rows;
}

} // namespace kernelwave
