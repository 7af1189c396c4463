#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "polynomial.hpp"

namespace kernelwave {

/// Complex power series in one variable truncated at a fixed order.
/// Coefficient of x^k lives at index k, k = 0..order.
class Series1 {
public:
  explicit Series1(int order) : order_(check_order(order)), c_(order + 1) {}
  Series1(int order, std::span<const cplx> coeffs) : Series1(order) {
    for (std::size_t k = 0; k < coeffs.size() && k <= static_cast<std::size_t>(order); ++k)
      c_[k] = coeffs[k];
  }

  static Series1 constant(int order, cplx value) {
    Series1 s(order);
    s.c_[0] = value;
    return s;
  }
  /// The series x.
  static Series1 variable(int order) {
    Series1 s(order);
    if (order >= 1)
      s.c_[1] = 1.0;
    return s;
  }

  int order() const { return order_; }
  cplx operator[](int k) const { return c_.at(k); }
  cplx& operator[](int k) { return c_.at(k); }
  std::span<const cplx> coeffs() const { return c_; }

  /// Horner evaluation of the truncated polynomial.
  cplx operator()(cplx x) const {
    cplx r{};
    for (int k = order_; k >= 0; --k)
      r = r * x + c_[k];
    return r;
  }

  Series1& operator+=(const Series1& o) {
    require_same(o);
    for (int k = 0; k <= order_; ++k)
      c_[k] += o.c_[k];
    return *this;
  }
  Series1& operator-=(const Series1& o) {
    require_same(o);
    for (int k = 0; k <= order_; ++k)
      c_[k] -= o.c_[k];
    return *this;
  }
  Series1& operator*=(cplx s) {
    for (auto& x : c_)
      x *= s;
    return *this;
  }
  friend Series1 operator+(Series1 a, const Series1& b) { return a += b; }
  friend Series1 operator-(Series1 a, const Series1& b) { return a -= b; }
  friend Series1 operator*(Series1 a, cplx s) { return a *= s; }
  friend Series1 operator*(cplx s, Series1 a) { return a *= s; }
  friend Series1 operator*(const Series1& a, const Series1& b) {
    a.require_same(b);
    Series1 r(a.order_);
    for (int i = 0; i <= a.order_; ++i) {
      if (a.c_[i] == cplx{})
        continue;
      for (int j = 0; i + j <= a.order_; ++j)
        r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }

  void require_same(const Series1& o) const {
    if (o.order_ != order_)
      throw UsageError("series order mismatch: " + std::to_string(order_) + " vs " +
                       std::to_string(o.order_));
  }

private:
  static int check_order(int order) {
    if (order < 0)
      throw UsageError("series order must be nonnegative");
    return order;
  }

  int order_;
  std::vector<cplx> c_;
};

/// Same coefficients, different truncation (padding with zeros when growing).
inline Series1 truncate(const Series1& s, int order) { return Series1(order, s.coeffs()); }

/// outer(inner(x)). inner must have zero constant term.
inline Series1 compose(const Series1& outer, const Series1& inner) {
  outer.require_same(inner);
  if (inner[0] != cplx{})
    throw UsageError("compose: inner series has a nonzero constant term; recenter the outer series first");
  Series1 r = Series1::constant(outer.order(), outer[outer.order()]);
  for (int k = outer.order() - 1; k >= 0; --k) {
    r = r * inner;
    r[0] += outer[k];
  }
  return r;
}

inline Series1 reciprocal(const Series1& a) {
  if (a[0] == cplx{})
    throw SingularSeriesError("reciprocal: constant term vanishes");
  Series1 r(a.order());
  r[0] = 1.0 / a[0];
  for (int n = 1; n <= a.order(); ++n) {
    cplx acc{};
    for (int k = 1; k <= n; ++k)
      acc += a[k] * r[n - k];
    r[n] = -acc * r[0];
  }
  return r;
}

/// exp of a series; a nonzero constant term is factored out as e^{a_0}.
inline Series1 exp(const Series1& a) {
  Series1 r(a.order());
  r[0] = std::exp(a[0]);
  // n r_n = sum_{k=1}^n k a_k r_{n-k}
  for (int n = 1; n <= a.order(); ++n) {
    cplx acc{};
    for (int k = 1; k <= n; ++k)
      acc += static_cast<double>(k) * a[k] * r[n - k];
    r[n] = acc / static_cast<double>(n);
  }
  return r;
}

/// d/dx; the result is known one order lower.
inline Series1 derivative(const Series1& a) {
  Series1 r(std::max(a.order() - 1, 0));
  for (int k = 1; k <= a.order(); ++k)
    r[k - 1] = static_cast<double>(k) * a[k];
  return r;
}

/// Coefficients conj(a_k).
inline Series1 conjugate_coeffs(const Series1& g) {
  Series1 r(g.order());
  for (int k = 0; k <= g.order(); ++k)
    r[k] = std::conj(g[k]);
  return r;
}

/// s(c x): coefficient k scaled by c^k.
inline Series1 scale_argument(const Series1& s, cplx c) {
  Series1 r(s.order());
  cplx p = 1.0;
  for (int k = 0; k <= s.order(); ++k, p *= c)
    r[k] = s[k] * p;
  return r;
}

/// f(s(x)) for a polynomial f, via a Taylor shift to s(0).
inline Series1 compose(const Polynomial& f, const Series1& s) {
  const Polynomial shifted = f.shifted(s[0]);
  Series1 outer(s.order());
  for (int k = 0; k <= std::min(s.order(), shifted.degree()); ++k)
    outer[k] = shifted[k];
  Series1 inner = s;
  inner[0] = 0.0;
  return compose(outer, inner);
}

/// Complex power series in two variables, total degree <= order.
/// Entry (k, l) is the coefficient of x^k y^l; entries with k + l > order stay zero.
class Series2 {
public:
  explicit Series2(int order)
      : order_(order < 0 ? throw UsageError("series order must be nonnegative") : order),
        c_(static_cast<std::size_t>(order + 1) * (order + 1)) {}

  static Series2 constant(int order, cplx value) {
    Series2 s(order);
    s(0, 0) = value;
    return s;
  }

  /// The linear form cx x + cy y.
  static Series2 linear(int order, cplx cx, cplx cy) {
    Series2 s(order);
    if (order >= 1) {
      s(1, 0) = cx;
      s(0, 1) = cy;
    }
    return s;
  }

  int order() const { return order_; }
  cplx operator()(int k, int l) const { return c_[index(k, l)]; }
  cplx& operator()(int k, int l) { return c_[index(k, l)]; }

  cplx evaluate(cplx x, cplx y) const {
    cplx r{};
    cplx xp = 1.0;
    for (int k = 0; k <= order_; ++k, xp *= x) {
      cplx row{};
      for (int l = order_ - k; l >= 0; --l)
        row = row * y + (*this)(k, l);
      r += xp * row;
    }
    return r;
  }

  Series2& operator+=(const Series2& o) {
    require_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
      c_[i] += o.c_[i];
    return *this;
  }
  Series2& operator-=(const Series2& o) {
    require_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
      c_[i] -= o.c_[i];
    return *this;
  }
  Series2& operator*=(cplx s) {
    for (auto& x : c_)
      x *= s;
    return *this;
  }
  friend Series2 operator+(Series2 a, const Series2& b) { return a += b; }
  friend Series2 operator-(Series2 a, const Series2& b) { return a -= b; }
  friend Series2 operator*(Series2 a, cplx s) { return a *= s; }
  friend Series2 operator*(cplx s, Series2 a) { return a *= s; }
  friend Series2 operator*(const Series2& a, const Series2& b) {
    a.require_same(b);
    const int n = a.order_;
    Series2 r(n);
    for (int k1 = 0; k1 <= n; ++k1)
      for (int l1 = 0; k1 + l1 <= n; ++l1) {
        const cplx x = a(k1, l1);
        if (x == cplx{})
          continue;
        for (int k2 = 0; k1 + l1 + k2 <= n; ++k2)
          for (int l2 = 0; k1 + l1 + k2 + l2 <= n; ++l2)
            r(k1 + k2, l1 + l2) += x * b(k2, l2);
      }
    return r;
  }

  void require_same(const Series2& o) const {
    if (o.order_ != order_)
      throw UsageError("series order mismatch: " + std::to_string(order_) + " vs " +
                       std::to_string(o.order_));
  }

private:
  std::size_t index(int k, int l) const {
    if (k < 0 || l < 0 || k + l > order_)
      throw UsageError("Series2 index (" + std::to_string(k) + "," + std::to_string(l) +
                       ") outside total degree " + std::to_string(order_));
    return static_cast<std::size_t>(k) * (order_ + 1) + l;
  }

  int order_;
  std::vector<cplx> c_;
};

/// outer(inner(x, y)) for univariate outer; inner's constant term must vanish.
inline Series2 compose(const Series1& outer, const Series2& inner) {
  if (inner(0, 0) != cplx{})
    throw UsageError("compose: inner series has a nonzero constant term");
  const int n = inner.order();
  const int top = std::min(n, outer.order());
  Series2 r = Series2::constant(n, outer[top]);
  for (int k = top - 1; k >= 0; --k) {
    r = r * inner;
    r(0, 0) += outer[k];
  }
  return r;
}

inline Series2 reciprocal(const Series2& a) {
  const cplx a0 = a(0, 0);
  if (a0 == cplx{})
    throw SingularSeriesError("reciprocal: constant term vanishes");
  // 1/(a0 (1 + t)) = (1/a0) sum (-t)^k
  Series2 t = a * (1.0 / a0);
  t(0, 0) = 0.0;
  Series1 geo(a.order());
  for (int k = 0; k <= a.order(); ++k)
    geo[k] = (k % 2 == 0 ? 1.0 : -1.0) / a0;
  return compose(geo, t);
}

inline Series2 exp(const Series2& a) {
  Series2 t = a;
  t(0, 0) = 0.0;
  Series1 e(a.order());
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0)
      fact *= k;
    e[k] = 1.0 / fact;
  }
  return compose(e, t) * std::exp(a(0, 0));
}

/// s(cx x + cy y) as a bivariate series of the same order as s.
inline Series2 substitute(const Series1& s, cplx cx, cplx cy) {
  const int n = s.order();
  const Series2 lin = Series2::linear(n, cx, cy);
  Series2 r = compose(Series1(n, s.coeffs()), lin);
  r(0, 0) = s[0];
  return r;
}

/// (s(p) - s(q)) / (p - q) for linear forms p = px x + py y, q = qx x + qy y,
/// expanded as sum_k s_k sum_j p^j q^{k-1-j}; needs s through order + 1.
inline Series2 divided_difference(const Series1& s, cplx px, cplx py, cplx qx, cplx qy,
                                  int order) {
  if (s.order() < order + 1)
    throw UsageError("divided_difference: series order too low");
  const Series2 p = Series2::linear(order, px, py);
  const Series2 q = Series2::linear(order, qx, qy);
  std::vector<Series2> ppow{Series2::constant(order, 1.0)}, qpow{Series2::constant(order, 1.0)};
  for (int k = 1; k <= order; ++k) {
    ppow.push_back(ppow.back() * p);
    qpow.push_back(qpow.back() * q);
  }
  Series2 r(order);
  for (int k = 1; k <= order + 1; ++k) {
    Series2 h(order);
    for (int j = 0; j <= k - 1; ++j)
      h += ppow[j] * qpow[k - 1 - j];
    r += h * s[k];
  }
  return r;
}

/// Local branch g with g(0) = center solving f(g(x)) - level = rhs_sign x^2.
///
/// Coefficients follow by matching powers of x: the x^{n+1} coefficient of
/// f(g(x)) is linear in a_n with pivot f''(center) a_1, everything else is known
/// from lower coefficients.
inline Series1 solve_branch(const Polynomial& f, cplx center, int rhs_sign, cplx level,
                            cplx first_coeff, int order) {
  if (rhs_sign != 1 && rhs_sign != -1)
    throw UsageError("solve_branch: rhs_sign must be +1 or -1");
  if (order < 1)
    throw UsageError("solve_branch: order must be at least 1");
  const Polynomial F = f.shifted(center) + Polynomial({-level});
  const double scale = rel_scale(level);
  if (std::abs(F[0]) > 1e-12 * scale)
    throw BranchError("solve_branch: level does not equal f(center)");
  if (std::abs(F[1]) > 1e-12 * rel_scale(F[2]))
    throw BranchError("solve_branch: center is not a critical point of f");
  const cplx c2 = F[2];
  if (std::abs(c2) < 1e-14)
    throw DegenerateSaddleError("solve_branch: f''(center) vanishes");
  if (std::abs(c2 * first_coeff * first_coeff - static_cast<double>(rhs_sign)) > 1e-12)
    throw BranchError("solve_branch: first_coeff does not select a branch of the quadratic model");

  const int work = order + 1;
  // Outer series in t = g - center.
  Series1 outer(work);
  for (int k = 0; k <= std::min(work, F.degree()); ++k)
    outer[k] = F[k];
  outer[0] = 0.0;
  outer[1] = 0.0;

  Series1 h(work);
  h[1] = first_coeff;
  const cplx pivot = 2.0 * c2 * first_coeff;
  for (int n = 2; n <= order; ++n) {
    h[n] = 0.0;
    const Series1 comp = compose(outer, h);
    h[n] = -comp[n + 1] / pivot;
  }
  Series1 g(order);
  g[0] = center;
  for (int k = 1; k <= order; ++k)
    g[k] = h[k];
  return g;
}

/// Largest coefficient of f(g(x)) - level - rhs_sign x^2 through g's order,
/// relative to max(|coefficient of g|, 1).
inline double branch_residual(const Polynomial& f, const Series1& g, int rhs_sign, cplx level) {
  Series1 fg = compose(f, g);
  fg[0] -= level;
  if (g.order() >= 2)
    fg[2] -= static_cast<double>(rhs_sign);
  double worst = 0.0;
  for (int k = 0; k <= g.order(); ++k)
    worst = std::max(worst, std::abs(fg[k]) / rel_scale(g[k]));
  return worst;
}

} // namespace kernelwave
