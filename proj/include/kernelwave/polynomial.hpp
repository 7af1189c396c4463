#pragma once

#include <algorithm>
#include <vector>

#include "common.hpp"

namespace kernelwave {

/// Dense complex polynomial, coefficient of z^k at index k.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : cplx{}; }

  cplx operator()(cplx z) const {
    cplx r{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
      r = r * z + *it;
    return r;
  }

  /// Value and first derivative in one Horner pass.
  std::pair<cplx, cplx> eval_d1(cplx z) const {
    cplx p{}, dp{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      dp = dp * z + p;
      p = p * z + *it;
    }
    return {p, dp};
  }

  Polynomial derivative() const {
    if (c_.size() <= 1)
      return Polynomial{};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
      d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  /// Coefficients of p(center + t) as a polynomial in t.
  Polynomial shifted(cplx center) const {
    std::vector<cplx> a = c_;
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i)
      for (int k = n - 2; k >= i; --k)
        a[k] += center * a[k + 1];
    return Polynomial(std::move(a));
  }

  Polynomial operator*(cplx s) const {
    std::vector<cplx> a = c_;
    for (auto& x : a)
      x *= s;
    return Polynomial(std::move(a));
  }

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q) {
    std::vector<cplx> a(std::max(p.c_.size(), q.c_.size()));
    for (std::size_t k = 0; k < a.size(); ++k)
      a[k] = p[static_cast<int>(k)] + q[static_cast<int>(k)];
    return Polynomial(std::move(a));
  }

  /// All complex roots (Aberth iteration, Newton polished).
  std::vector<cplx> roots() const;

private:
  void trim() {
    while (c_.size() > 1 && c_.back() == cplx{})
      c_.pop_back();
    if (c_.empty())
      c_.push_back({});
  }

  std::vector<cplx> c_{cplx{}};
};

inline std::vector<cplx> Polynomial::roots() const {
  const int n = degree();
  if (n < 1)
    return {};
  const cplx lead = c_.back();
  double radius = 0.0;
  for (int k = 0; k < n; ++k)
    radius = std::max(radius, std::pow(std::abs(c_[k] / lead), 1.0 / (n - k)));
  radius = 2.0 * std::max(radius, 1e-3);

  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = radius * expi(2.0 * pi * (k + 0.25) / n);

  const Polynomial d = derivative();
  for (int it = 0; it < 500; ++it) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx p = (*this)(z[k]);
      const cplx dp = d(z[k]);
      if (p == cplx{})
        continue;
      const cplx ratio = p / dp;
      cplx repulse{};
      for (int j = 0; j < n; ++j)
        if (j != k)
          repulse += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * repulse);
      z[k] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-15)
      break;
  }
  for (auto& r : z) {
    for (int it = 0; it < 3; ++it) {
      const cplx dp = d(r);
      if (dp == cplx{})
        break;
      r -= (*this)(r) / dp;
    }
  }
  return z;
}

} // namespace kernelwave
