#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <vector>

#include "common.hpp"
#include "phase.hpp"

namespace kernelwave {

/// z(t) and dz/dt.
using ArcMap = std::function<std::pair<cplx, cplx>(double)>;

/// One parameterized arc t in [t0, t1].
struct Panel {
  double t0 = 0.0, t1 = 1.0;
  ArcMap map;
  bool starts_piece = false;

  cplx start() const { return map(t0).first; }
  cplx end() const { return map(t1).first; }
};

/// Oriented chain of panels. Pieces (runs of panels) must be continuous;
/// separate pieces are joined at infinity. Crossings are points where another
/// contour meets this one and must coincide with panel endpoints.
struct Contour {
  std::vector<Panel> panels;
  std::vector<cplx> crossings;
  std::vector<double> ray_radii;

  void append(Panel p, bool new_piece) {
    p.starts_piece = new_piece || panels.empty();
    panels.push_back(std::move(p));
  }
};

inline Panel segment_panel(cplx a, cplx b) {
  Panel p;
  p.map = [a, b](double t) { return std::pair<cplx, cplx>{a + t * (b - a), b - a}; };
  return p;
}

/// Checks chain continuity inside each piece and that crossings sit on panel ends.
inline void validate(const Contour& c, double tol = 1e-12) {
  if (c.panels.empty())
    throw GeometryError("contour has no panels");
  for (std::size_t k = 0; k < c.panels.size(); ++k) {
    const Panel& p = c.panels[k];
    if (!(p.t1 > p.t0))
      throw GeometryError("panel " + std::to_string(k) + " has an empty parameter range");
    if (k > 0 && !p.starts_piece) {
      const cplx a = c.panels[k - 1].end(), b = p.start();
      if (std::abs(a - b) > tol * std::max(1.0, std::abs(a)))
        throw GeometryError("contour is discontinuous at panel " + std::to_string(k));
    }
  }
  for (cplx x : c.crossings) {
    bool found = false;
    for (const auto& p : c.panels)
      found = found || std::abs(p.start() - x) < tol || std::abs(p.end() - x) < tol;
    if (!found)
      throw GeometryError("crossing marker does not lie on a panel boundary");
  }
}

/// Largest r with envelope(r) >= running max - budget, scanning outward from r = 0.
///
/// Returns the first radius past the envelope maximum where the drop reaches the
/// budget, located by bisection.
inline double truncation_radius(const std::function<double(double)>& envelope, double budget,
                                double r_limit = 1e4) {
  if (!(budget > 0))
    throw GeometryError("ray truncation budget must be positive");
  double best = envelope(0.0);
  double prev = 0.0;
  double r = 1e-3;
  while (r <= r_limit) {
    const double e = envelope(r);
    if (!std::isfinite(e))
      throw GeometryError("ray envelope is not finite");
    if (e > best)
      best = e;
    if (e < best - budget) {
      double lo = prev, hi = r;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (envelope(mid) < best - budget ? hi : lo) = mid;
      }
      return hi;
    }
    prev = r;
    r *= 1.05;
    r += 1e-3;
  }
  throw GeometryError("ray envelope does not decay");
}

/// Half-infinite straight ray vertex + r * direction.
struct Ray {
  cplx vertex;
  cplx direction;
  bool inward = false;
};

/// Clips each ray where the exponent's real part along it has dropped by `budget`
/// below its running maximum, then cuts it into panels graded geometrically
/// away from the vertex (first panel length `first`, ratio 2). Consecutive rays
/// in `rays` whose endpoints meet form one piece.
inline Contour truncate_rays(const std::vector<Ray>& rays, const std::function<double(cplx)>& envelope,
                             double budget, double first) {
  if (!(first > 0))
    throw UsageError("truncate_rays: first panel length must be positive");
  Contour c;
  cplx last_end{};
  bool have_last = false;
  for (const Ray& ray : rays) {
    const cplx d = ray.direction / std::abs(ray.direction);
    const double radius =
        truncation_radius([&](double r) { return envelope(ray.vertex + r * d); }, budget);
    c.ray_radii.push_back(radius);
    std::vector<double> cuts{0.0};
    for (double r = first; r < radius; r *= 2.0)
      cuts.push_back(r);
    if (cuts.size() > 1 && radius - cuts.back() < 0.25 * (cuts.back() - cuts[cuts.size() - 2]))
      cuts.back() = radius;
    else
      cuts.push_back(radius);
    std::vector<Panel> ps;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      ps.push_back(segment_panel(ray.vertex + cuts[k] * d, ray.vertex + cuts[k + 1] * d));
    if (ray.inward) {
      std::reverse(ps.begin(), ps.end());
      for (auto& p : ps) {
        const auto m = p.map;
        p.map = [m](double t) {
          auto [z, dz] = m(1.0 - t);
          return std::pair<cplx, cplx>{z, -dz};
        };
      }
    }
    const cplx start = ps.front().start();
    bool first_panel = !have_last || std::abs(start - last_end) > 1e-12 * std::max(1.0, std::abs(start));
    for (auto& p : ps) {
      c.append(std::move(p), first_panel);
      first_panel = false;
    }
    last_end = c.panels.back().end();
    have_last = true;
  }
  return c;
}

/// Panels along a steepest path in its natural parameter x, split symmetric about
/// the saddle (first panel `first` on each side, then doubling) up to |x| = x_cut.
inline void append_steepest(Contour& c, std::shared_ptr<const SteepestPath> path, double x_lo,
                            double x_hi, double first, bool new_piece) {
  if (!(x_lo < 0 && x_hi > 0))
    throw UsageError("append_steepest: the range must contain the saddle");
  if (std::max(-x_lo, x_hi) > path->x_max())
    throw GeometryError("append_steepest: range exceeds the path's tabulated extent");
  std::vector<double> pos{0.0}, neg{0.0};
  auto grade = [first](std::vector<double>& cuts, double end) {
    for (double r = first; r < end; r *= 2.0)
      cuts.push_back(r);
    if (cuts.size() > 1 && end - cuts.back() < 0.25 * (cuts.back() - cuts[cuts.size() - 2]))
      cuts.back() = end;
    else
      cuts.push_back(end);
  };
  grade(pos, x_hi);
  grade(neg, -x_lo);
  std::vector<double> cuts;
  for (auto it = neg.rbegin(); it != neg.rend(); ++it)
    cuts.push_back(-*it);
  cuts.insert(cuts.end(), pos.begin() + 1, pos.end());
  ArcMap m = [path](double x) { return path->eval(x); };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Panel p;
    p.t0 = cuts[k];
    p.t1 = cuts[k + 1];
    p.map = m;
    c.append(std::move(p), new_piece && k == 0);
  }
}

} // namespace kernelwave
