#ifndef SASCOMP_KERNELS_HPP
#define SASCOMP_KERNELS_HPP

// Trigonometric kernels shared by the closed-form Jacobi, volume, Hessian and
// barrier formulas on Sasakian space forms.
//
// Every kernel is a function of the signed argument x = sign(sigma) * tau^2:
// x > 0 uses cos/sin of tau, x < 0 uses cosh/sinh, and a neighbourhood of 0 uses
// the Taylor series so the three cases join continuously.

#include "sascomp/types.hpp"

#include <cmath>

namespace sascomp::kernel {

enum class Branch { Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Elliptic: return "sigma>0";
    case Branch::Parabolic: return "sigma=0";
    case Branch::Hyperbolic: return "sigma<0";
  }
  return "?";
}

/// sigma counts as zero below 1e-9 relative to the size of its ingredients.
inline Branch classify(double sigma, double scale = 1.0) {
  if (std::abs(sigma) <= 1e-9 * std::max(scale, 1.0)) return Branch::Parabolic;
  return sigma > 0.0 ? Branch::Elliptic : Branch::Hyperbolic;
}

/// |x| below this uses the series.
inline constexpr double kSeriesWindow = 0.1;
inline constexpr int kSeriesTerms = 10;

namespace detail {

// sum_n coeff(n) x^n, coefficients from a recurrence-free lambda
template <class Coeff>
double series(double x, Coeff coeff) {
  double sum = 0.0;
  double power = 1.0;
  for (int n = 0; n < kSeriesTerms; ++n) {
    sum += coeff(n) * power;
    power *= x;
  }
  return sum;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double sign_pow(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

/// cos(tau) for x = tau^2, cosh(tau) for x = -tau^2.
inline double cosq(double x) {
  if (x >= 0.0) return std::cos(std::sqrt(x));
  return std::cosh(std::sqrt(-x));
}

/// sin(tau)/tau, resp. sinh(tau)/tau.
inline double sinc(double x) {
  if (std::abs(x) < kSeriesWindow)
    return detail::series(x, [](int n) { return detail::sign_pow(n) / detail::factorial(2 * n + 1); });
  if (x > 0.0) {
    const double t = std::sqrt(x);
    return std::sin(t) / t;
  }
  const double t = std::sqrt(-x);
  return std::sinh(t) / t;
}

/// (1 - cos tau)/tau^2, resp. (cosh tau - 1)/tau^2; limit 1/2.
inline double c1(double x) {
  if (std::abs(x) < kSeriesWindow)
    return detail::series(x, [](int n) { return detail::sign_pow(n) / detail::factorial(2 * n + 2); });
  return (1.0 - cosq(x)) / x;
}

/// (sin tau - tau cos tau)/tau^3, resp. (tau cosh tau - sinh tau)/tau^3; limit 1/3.
inline double e1(double x) {
  if (std::abs(x) < kSeriesWindow)
    return detail::series(x, [](int n) {
      return detail::sign_pow(n + 1) *
             (1.0 / detail::factorial(2 * n + 3) - 1.0 / detail::factorial(2 * n + 2));
    });
  return (sinc(x) - cosq(x)) / x;
}

/// (2 - 2cos tau - tau sin tau)/tau^4, resp. (2 - 2cosh tau + tau sinh tau)/tau^4; limit 1/12.
inline double d2(double x) {
  if (std::abs(x) < kSeriesWindow)
    return detail::series(x, [](int n) {
      return detail::sign_pow(n) * (2.0 * n + 2.0) / detail::factorial(2 * n + 4);
    });
  if (x > 0.0) {
    const double t = std::sqrt(x);
    return (2.0 - 2.0 * std::cos(t) - t * std::sin(t)) / (x * x);
  }
  const double t = std::sqrt(-x);
  return (2.0 - 2.0 * std::cosh(t) + t * std::sinh(t)) / (x * x);
}

/// Series-only evaluations, used to check continuity of the handover.
namespace series {
inline double c1(double x) {
  return detail::series(x, [](int n) { return detail::sign_pow(n) / detail::factorial(2 * n + 2); });
}
inline double e1(double x) {
  return detail::series(x, [](int n) {
    return detail::sign_pow(n + 1) * (1.0 / detail::factorial(2 * n + 3) - 1.0 / detail::factorial(2 * n + 2));
  });
}
inline double d2(double x) {
  return detail::series(x, [](int n) {
    return detail::sign_pow(n) * (2.0 * n + 2.0) / detail::factorial(2 * n + 4);
  });
}
inline double sinc(double x) {
  return detail::series(x, [](int n) { return detail::sign_pow(n) / detail::factorial(2 * n + 1); });
}
}  // namespace series

/// Closed-form (non-series) evaluations.
namespace closed {
inline double d2(double x) {
  if (x > 0.0) {
    const double t = std::sqrt(x);
    return (2.0 - 2.0 * std::cos(t) - t * std::sin(t)) / (x * x);
  }
  const double t = std::sqrt(-x);
  return (2.0 - 2.0 * std::cosh(t) + t * std::sinh(t)) / (x * x);
}
inline double e1(double x) {
  if (x > 0.0) {
    const double t = std::sqrt(x);
    return (std::sin(t) - t * std::cos(t)) / (t * t * t);
  }
  const double t = std::sqrt(-x);
  return (t * std::cosh(t) - std::sinh(t)) / (t * t * t);
}
inline double c1(double x) { return (1.0 - cosq(x)) / x; }
}  // namespace closed

/// First positive zero of d2 (conjugate locus): tau = 2 pi.
inline constexpr double kFirstConjugateTau = kTwoPi;
/// First positive zero of cos (pole of the U matrices): tau = pi/2.
inline constexpr double kFirstUPoleTau = kPi / 2.0;

}  // namespace sascomp::kernel

#endif  // SASCOMP_KERNELS_HPP
