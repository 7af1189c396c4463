#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kernelwave {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// e^{i theta}
inline cplx expi(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (order mismatch, bad argument, ...).
class UsageError : public Error {
public:
  using Error::Error;
};

/// Reciprocal of a series whose constant term vanishes.
class SingularSeriesError : public Error {
public:
  using Error::Error;
};

/// Saddle with vanishing second derivative.
class DegenerateSaddleError : public Error {
public:
  using Error::Error;
};

/// Branch data inconsistent with the algebraic equation it should solve.
class BranchError : public Error {
public:
  using Error::Error;
};

/// Path tracing stalled (step underflow near an unexpected stationary point).
class TraceError : public Error {
public:
  using Error::Error;
};

/// Contour geometry unusable for quadrature.
class GeometryError : public Error {
public:
  using Error::Error;
};

class FitError : public Error {
public:
  using Error::Error;
};

/// Residuals drowned in quadrature noise.
class InsufficientPrecisionError : public Error {
public:
  using Error::Error;
};

/// max(|x|, 1), used for relative comparisons of coefficients.
inline double rel_scale(cplx x) { return std::max(std::abs(x), 1.0); }

/// Gamma(n/2) for integer n >= 1, by recurrence from Gamma(1/2) and Gamma(1).
inline double half_gamma(int twice_x) {
  if (twice_x < 1)
    throw UsageError("half_gamma: argument must be positive");
  double g = (twice_x % 2 == 1) ? std::sqrt(pi) : 1.0;
  for (int t = (twice_x % 2 == 1) ? 1 : 2; t < twice_x; t += 2)
    g *= 0.5 * t;
  return g;
}

} // namespace kernelwave
