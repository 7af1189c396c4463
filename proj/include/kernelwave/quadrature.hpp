#pragma once

#include <functional>
#include <vector>

#include "common.hpp"
#include "contour.hpp"
#include "gauss_legendre.hpp"

namespace kernelwave {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int nodes_per_panel = 32;
  int max_refine_depth = 12;
  double ray_truncation_budget = 60.0;
  double duffy_radius = 0.3;
  /// Work cap for double integrals: refinement stops (unconverged) before a
  /// level whose integrand evaluations would exceed this count.
  double max_pair_evaluations = 6e7;

  void validate() const {
    if (!(rel_tol > 0 && abs_tol > 0 && nodes_per_panel > 0 && max_refine_depth > 0 &&
          ray_truncation_budget > 0 && duffy_radius > 0 && max_pair_evaluations > 0))
      throw UsageError("quadrature options must all be positive");
  }
};

struct QuadResult {
  cplx value{};
  double error = 0.0;
  bool converged = false;
  int levels = 0;
};

namespace detail {

struct Node {
  cplx z;
  cplx w; ///< Gauss weight times dz/dt
};

/// Nodes of every panel split into 2^level equal parts; offsets[k] is where
/// panel k's nodes begin.
struct NodeSet {
  std::vector<Node> nodes;
  std::vector<std::size_t> offsets;
};

inline NodeSet contour_nodes(const Contour& c, const GaussRule& rule, int level) {
  NodeSet s;
  const int parts = 1 << level;
  for (const Panel& p : c.panels) {
    s.offsets.push_back(s.nodes.size());
    const double h = (p.t1 - p.t0) / parts;
    for (int k = 0; k < parts; ++k) {
      const double mid = p.t0 + (k + 0.5) * h;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = mid + 0.5 * h * rule.x[i];
        const auto [z, dz] = p.map(t);
        s.nodes.push_back({z, 0.5 * h * rule.w[i] * dz});
      }
    }
  }
  s.offsets.push_back(s.nodes.size());
  return s;
}

inline bool within_tol(const QuadResult& r, const QuadOptions& o) {
  return r.error <= std::max(o.abs_tol, o.rel_tol * std::abs(r.value));
}

/// Panel pair meeting at a declared crossing: which ends touch.
struct CornerPair {
  std::size_t a, b;
  bool a_at_end, b_at_end;
};

inline std::vector<CornerPair> corner_pairs(const Contour& A, const Contour& B) {
  std::vector<cplx> marks = A.crossings;
  marks.insert(marks.end(), B.crossings.begin(), B.crossings.end());
  std::vector<CornerPair> out;
  const double tol = 1e-12;
  for (std::size_t i = 0; i < A.panels.size(); ++i) {
    const cplx a0 = A.panels[i].start(), a1 = A.panels[i].end();
    for (std::size_t j = 0; j < B.panels.size(); ++j) {
      const cplx b0 = B.panels[j].start(), b1 = B.panels[j].end();
      for (cplx m : marks) {
        const bool ia0 = std::abs(a0 - m) < tol, ia1 = std::abs(a1 - m) < tol;
        const bool jb0 = std::abs(b0 - m) < tol, jb1 = std::abs(b1 - m) < tol;
        if ((ia0 || ia1) && (jb0 || jb1)) {
          out.push_back({i, j, ia1, jb1});
          break;
        }
      }
      const bool touch = std::abs(a0 - b0) < tol || std::abs(a0 - b1) < tol || std::abs(a1 - b0) < tol ||
                         std::abs(a1 - b1) < tol;
      if (touch && (out.empty() || out.back().a != i || out.back().b != j))
        throw GeometryError("contours meet at a panel end that is not a declared crossing");
    }
  }
  return out;
}

/// Polar (Duffy) rule on a panel pair whose parameter square has a singular
/// corner: the square is cut along its diagonal and each triangle is mapped
/// from (rho, eta) in [0,1]^2 with Jacobian rho.
template <class Pair>
cplx duffy_block(const Panel& pa, bool a_at_end, const Panel& pb, bool b_at_end, const GaussRule& rule,
                 int level, Pair&& pair) {
  const double la = pa.t1 - pa.t0, lb = pb.t1 - pb.t0;
  auto at_a = [&](double s) {
    const double t = a_at_end ? pa.t1 - s * la : pa.t0 + s * la;
    auto [z, dz] = pa.map(t);
    return Node{z, dz * la};
  };
  auto at_b = [&](double s) {
    const double t = b_at_end ? pb.t1 - s * lb : pb.t0 + s * lb;
    auto [z, dz] = pb.map(t);
    return Node{z, dz * lb};
  };
  const int parts = 1 << level;
  std::vector<double> xs, ws;
  for (int k = 0; k < parts; ++k)
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      xs.push_back((k + 0.5 * (1.0 + rule.x[i])) / parts);
      ws.push_back(0.5 * rule.w[i] / parts);
    }
  cplx total{};
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const double rho = xs[r];
    const Node na = at_a(rho), nb = at_b(rho);
    for (std::size_t e = 0; e < xs.size(); ++e) {
      const double jac = ws[r] * ws[e] * rho;
      const double s = rho * xs[e];
      total += jac * pair(na, at_b(s));
      total += jac * pair(at_a(s), nb);
    }
  }
  return total;
}

template <class Pair>
QuadResult integrate_double_impl(const Contour& A, const Contour& B, const QuadOptions& opts, Pair&& pair,
                                 const std::function<void(const NodeSet&, const NodeSet&)>& prepare) {
  opts.validate();
  validate(A);
  validate(B);
  const GaussRule rule = gauss_legendre(opts.nodes_per_panel);
  const auto corners = corner_pairs(A, B);
  std::vector<char> is_corner(A.panels.size() * B.panels.size(), 0);
  for (const auto& c : corners)
    is_corner[c.a * B.panels.size() + c.b] = 1;

  QuadResult best;
  cplx prev{};
  for (int level = 0; level <= opts.max_refine_depth; ++level) {
    const double per = static_cast<double>(opts.nodes_per_panel) * (1 << level);
    const double work = per * per *
                        (static_cast<double>(A.panels.size() * B.panels.size()) + 2.0 * corners.size());
    if (level >= 2 && work > opts.max_pair_evaluations)
      break;
    const NodeSet na = contour_nodes(A, rule, level);
    const NodeSet nb = contour_nodes(B, rule, level);
    if (prepare)
      prepare(na, nb);
    cplx sum{};
    for (std::size_t i = 0; i < A.panels.size(); ++i)
      for (std::size_t j = 0; j < B.panels.size(); ++j) {
        if (is_corner[i * B.panels.size() + j])
          continue;
        cplx block{};
        for (std::size_t p = na.offsets[i]; p < na.offsets[i + 1]; ++p) {
          cplx row{};
          for (std::size_t q = nb.offsets[j]; q < nb.offsets[j + 1]; ++q)
            row += pair.tensor(p, q);
          block += row;
        }
        sum += block;
      }
    for (const auto& c : corners)
      sum += duffy_block(A.panels[c.a], c.a_at_end, B.panels[c.b], c.b_at_end, rule, level,
                         [&](const Node& x, const Node& y) { return pair(x, y); });
    best.value = sum;
    best.levels = level + 1;
    if (level > 0) {
      best.error = std::abs(sum - prev);
      if (within_tol(best, opts)) {
        best.converged = true;
        return best;
      }
    } else {
      best.error = std::abs(sum);
    }
    prev = sum;
  }
  return best;
}

} // namespace detail

/// Integral of F over a contour: Gauss-Legendre per panel, with uniform dyadic
/// refinement until two successive levels agree. The error estimate is the last
/// level difference.
inline QuadResult integrate_single(const std::function<cplx(cplx)>& F, const Contour& c,
                                   const QuadOptions& opts = {}) {
  opts.validate();
  validate(c);
  const GaussRule rule = gauss_legendre(opts.nodes_per_panel);
  QuadResult r;
  cplx prev{};
  for (int level = 0; level <= opts.max_refine_depth; ++level) {
    const auto ns = detail::contour_nodes(c, rule, level);
    cplx sum{};
    for (const auto& n : ns.nodes)
      sum += n.w * F(n.z);
    r.value = sum;
    r.levels = level + 1;
    if (level > 0) {
      r.error = std::abs(sum - prev);
      if (detail::within_tol(r, opts)) {
        r.converged = true;
        return r;
      }
    } else {
      r.error = std::abs(sum);
    }
    prev = sum;
  }
  return r;
}

/// Double integral of F(zeta, omega) over A x B. Panel pairs that meet at a
/// declared crossing get the polar rule; all other pairs use tensor Gauss-Legendre.
inline QuadResult integrate_double(const std::function<cplx(cplx, cplx)>& F, const Contour& A,
                                   const Contour& B, const QuadOptions& opts = {}) {
  struct Pair {
    const std::function<cplx(cplx, cplx)>& F;
    const detail::NodeSet* na = nullptr;
    const detail::NodeSet* nb = nullptr;
    cplx operator()(const detail::Node& x, const detail::Node& y) const { return x.w * y.w * F(x.z, y.z); }
    cplx tensor(std::size_t p, std::size_t q) const { return (*this)(na->nodes[p], nb->nodes[q]); }
  } pair{F};
  return detail::integrate_double_impl(A, B, opts, pair, [&](const detail::NodeSet& a, const detail::NodeSet& b) {
    pair.na = &a;
    pair.nb = &b;
  });
}

/// Cauchy-form double integral of p(zeta) q(omega) / (zeta - omega). p and q are
/// evaluated once per node, so each node pair costs one division.
inline QuadResult integrate_cauchy(const std::function<cplx(cplx)>& p, const std::function<cplx(cplx)>& q,
                                   const Contour& A, const Contour& B, const QuadOptions& opts = {}) {
  struct Pair {
    const std::function<cplx(cplx)>& p;
    const std::function<cplx(cplx)>& q;
    std::vector<cplx> pa, qb, za, zb;
    cplx operator()(const detail::Node& x, const detail::Node& y) const {
      return x.w * p(x.z) * y.w * q(y.z) / (x.z - y.z);
    }
    cplx tensor(std::size_t i, std::size_t j) const {
      const cplx d = za[i] - zb[j];
      if (std::abs(d) < 1e-9 * std::max(1.0, std::abs(za[i])))
        throw GeometryError("integrate_cauchy: contours meet at an undeclared point");
      return pa[i] * qb[j] / d;
    }
  } pair{p, q, {}, {}, {}, {}};
  return detail::integrate_double_impl(A, B, opts, pair, [&](const detail::NodeSet& a, const detail::NodeSet& b) {
    pair.pa.clear();
    pair.za.clear();
    pair.qb.clear();
    pair.zb.clear();
    for (const auto& n : a.nodes) {
      pair.za.push_back(n.z);
      pair.pa.push_back(n.w * p(n.z));
    }
    for (const auto& n : b.nodes) {
      pair.zb.push_back(n.z);
      pair.qb.push_back(n.w * q(n.z));
    }
  });
}

} // namespace kernelwave
