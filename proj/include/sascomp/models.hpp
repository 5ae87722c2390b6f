#ifndef SASCOMP_MODELS_HPP
#define SASCOMP_MODELS_HPP

// The three Sasakian space forms (Heisenberg, SU(2), SL(2) with metric g^c),
// their injectivity domains, and the cut-time analysis for SL(2).

#include "sascomp/frame.hpp"
#include "sascomp/spaces.hpp"
#include "sascomp/types.hpp"

#include <boost/math/tools/minima.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sascomp {

enum class ModelKind { Heisenberg, SU2, SL2 };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Heisenberg: return "heisenberg";
    case ModelKind::SU2: return "su2";
    case ModelKind::SL2: return "sl2";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "heisenberg") return ModelKind::Heisenberg;
  if (s == "su2") return ModelKind::SU2;
  if (s == "sl2") return ModelKind::SL2;
  throw Error(ErrorKind::InvalidConfig, "unknown model '" + s + "'");
}

/// Heisenberg frame: v1 = d_x - y/2 d_z, v2 = d_y + x/2 d_z, v0 = -d_z so that [v1,v2] = -v0.
inline ContactFrame heisenberg_frame() {
  auto fields = [](const Vec3& p) {
    Mat3 v;
    v.col(0) = Vec3(0.0, 0.0, -1.0);
    v.col(1) = Vec3(1.0, 0.0, -0.5 * p(1));
    v.col(2) = Vec3(0.0, 1.0, 0.5 * p(0));
    return v;
  };
  auto structure = [](const Vec3&) {
    StructureConstants a;
    a.set(1, 2, 0, -1.0);
    return a;
  };
  auto derivatives = [](const Vec3&) { return StructureDerivatives{}; };
  return ContactFrame(fields, structure, derivatives);
}

inline ChartSpace heisenberg_space() { return ChartSpace(heisenberg_frame()); }

/// su(2) generators u1, u2 of the standard distribution.
inline std::pair<Mat2c, Mat2c> su2_generators() {
  Mat2c u1, u2;
  u1 << 0.0, 0.5, -0.5, 0.0;
  u2 << 0.0, cplx(0.0, 0.5), cplx(0.0, 0.5), 0.0;
  return {u1, u2};
}

/// sl(2) generators u1, u2 of the standard distribution.
inline std::pair<Mat2c, Mat2c> sl2_generators() {
  Mat2c u1, u2;
  u1 << 0.5, 0.0, 0.0, -0.5;
  u2 << 0.0, 0.5, 0.5, 0.0;
  return {u1, u2};
}

/// Orthonormal frame c u1, c u2 and Reeb field v0 = -[v1, v2] (so a_12^0 = -1).
inline MatrixGroupSpace metric_group_space(const std::pair<Mat2c, Mat2c>& gens, double c) {
  const Mat2c v1 = c * gens.first;
  const Mat2c v2 = c * gens.second;
  const Mat2c v0 = -(v1 * v2 - v2 * v1);
  return MatrixGroupSpace({v0, v1, v2});
}

inline MatrixGroupSpace su2_space(double c) { return metric_group_space(su2_generators(), c); }
inline MatrixGroupSpace sl2_space(double c) { return metric_group_space(sl2_generators(), c); }

inline constexpr double sl2_validity_radius(double c) { return 2.0 * std::numbers::sqrt2 * kPi / c; }

/// Rotationally symmetric injectivity domain in cylindrical momenta (r, theta, h),
/// r = sqrt(2H), h = h0, for curves parametrised on [0, 1].
struct InjectivityDomain {
  ModelKind kind = ModelKind::Heisenberg;
  double c = 1.0;
  double R = 1.0;

  double k() const {
    switch (kind) {
      case ModelKind::Heisenberg: return 0.0;
      case ModelKind::SU2: return c * c;
      case ModelKind::SL2: return -c * c;
    }
    return 0.0;
  }

  /// Admissible |h| for a given r as [lo, hi]; empty when lo > hi.
  std::pair<double, double> h_range(double r) const {
    constexpr double four_pi2 = 4.0 * kPi * kPi;
    if (r < 0.0 || r > R) return {1.0, 0.0};
    switch (kind) {
      case ModelKind::Heisenberg: return {0.0, kTwoPi};
      case ModelKind::SU2: {
        const double rest = four_pi2 - c * c * r * r;
        if (rest < 0.0) return {1.0, 0.0};
        return {0.0, std::sqrt(rest)};
      }
      case ModelKind::SL2: {
        const double cr2 = c * c * r * r;
        return {std::sqrt(std::max(0.0, cr2 - four_pi2)), std::sqrt(four_pi2 + cr2)};
      }
    }
    return {1.0, 0.0};
  }

  bool contains(double r, double h) const {
    const auto [lo, hi] = h_range(r);
    const double a = std::abs(h);
    return lo <= hi && a >= lo && a <= hi;
  }

  /// Membership from frame momenta (h0, h1, h2); independent of the angle.
  bool contains(const Vec3& alpha) const {
    return contains(std::hypot(alpha(1), alpha(2)), alpha(0));
  }

  /// sigma = h^2 + k r^2 (its square root is tau at time 1).
  double sigma(double r, double h) const { return h * h + k() * r * r; }
};

struct ModelSpace {
  ModelKind kind = ModelKind::Heisenberg;
  double c = 1.0;

  double k() const { return InjectivityDomain{kind, c, 1.0}.k(); }

  /// Chart frame: explicit for Heisenberg, second-kind canonical coordinates for the groups.
  ContactFrame chart_frame() const {
    switch (kind) {
      case ModelKind::Heisenberg: return heisenberg_frame();
      case ModelKind::SU2: return left_invariant_chart_frame(su2_space(c).algebra());
      case ModelKind::SL2: return left_invariant_chart_frame(sl2_space(c).algebra());
    }
    return heisenberg_frame();
  }

  StructureConstants structure() const {
    switch (kind) {
      case ModelKind::Heisenberg: return heisenberg_frame().structure(Vec3::Zero());
      case ModelKind::SU2: return su2_space(c).algebra();
      case ModelKind::SL2: return sl2_space(c).algebra();
    }
    return {};
  }

  std::string name() const { return to_string(kind); }
};

/// Calls fn with the concrete space (ChartSpace or MatrixGroupSpace) of a model.
template <class Fn>
decltype(auto) with_space(const ModelSpace& m, Fn&& fn) {
  switch (m.kind) {
    case ModelKind::SU2: return fn(su2_space(m.c));
    case ModelKind::SL2: return fn(sl2_space(m.c));
    case ModelKind::Heisenberg: break;
  }
  return fn(heisenberg_space());
}

inline InjectivityDomain injectivity_domain(const ModelSpace& m, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::Domain, "radius must be positive");
  if (m.kind == ModelKind::SL2 && R > sl2_validity_radius(m.c) * (1.0 + 1e-12))
    throw Error(ErrorKind::Domain, "SL(2) injectivity domain only known for R <= 2 sqrt(2) pi / c");
  return {m.kind, m.c, R};
}

// ---------------------------------------------------------------------------
// SL(2) cut-time analysis. f(y) = tan(sqrt y)/sqrt y, g(y) = tanh(sqrt y)/sqrt y.

namespace cut {

/// tan(u)/u, the function f at y = u^2.
inline double f_of_u(double u) { return u == 0.0 ? 1.0 : std::tan(u) / u; }

/// f'(y) = (1 + y f^2 - f) / (2y), series near y = 0; extends to y < 0 through f(y) = g(-y).
inline double f_prime(double y) {
  if (std::abs(y) < 1e-3)
    return 1.0 / 3.0 + 4.0 * y / 15.0 + 51.0 * y * y / 315.0 + 248.0 * y * y * y / 2835.0;
  double f;
  if (y > 0.0) {
    const double u = std::sqrt(y);
    f = std::tan(u) / u;
  } else {
    const double u = std::sqrt(-y);
    f = std::tanh(u) / u;
  }
  return (1.0 + y * f * f - f) / (2.0 * y);
}

/// g'(y) = (1 - y g^2 - g) / (2y) = -f'(-y).
inline double g_prime(double y) { return -f_prime(-y); }

/// Root of tan(u)/u = x on branch m: u in [0, pi/2) for m = 0, (m pi - pi/2, m pi + pi/2) otherwise.
/// Bisection to 1e-3, then bracketed Newton on sin u - x u cos u until the step stalls.
inline double branch_root(int m, double x) {
  double lo, hi;
  if (m == 0) {
    if (x < 1.0) throw Error(ErrorKind::Domain, "branch 0 of tan(u)/u needs x >= 1");
    if (x == 1.0) return 0.0;
    lo = 0.0;
    hi = kPi / 2.0;
  } else {
    lo = m * kPi - kPi / 2.0;
    hi = m * kPi + kPi / 2.0;
  }
  // tan(u)/u - x increases across the branch.
  auto phi = [x](double u) { return std::sin(u) - x * u * std::cos(u); };
  // sign of tan(u)/u - x equals sign(phi)*sign(cos u)
  auto above = [&](double u) {
    const double c = std::cos(u);
    return (phi(u) * (c >= 0.0 ? 1.0 : -1.0)) > 0.0;
  };
  double a = lo, b = hi;
  while (b - a > 1e-3) {
    const double mid = 0.5 * (a + b);
    if (above(mid))
      b = mid;
    else
      a = mid;
  }
  double u = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double der = std::cos(u) - x * std::cos(u) + x * u * std::sin(u);
    double next = u - phi(u) / der;
    if (std::abs(next - u) <= 1e-15 * std::max(1.0, u)) {
      u = next;
      break;
    }
    if (!(next >= a && next <= b)) next = 0.5 * (a + b);
    u = next;
    if (above(u))
      b = u;
    else
      a = u;
  }
  return u;
}

/// n-th smallest nonnegative branch inverse of f (n = 1, 2, ...).
inline double F(int n, double x) {
  if (x < 0.0) throw Error(ErrorKind::Domain, "branch inverses need x >= 0");
  const int first = x >= 1.0 ? 0 : 1;
  const double u = branch_root(first + n - 1, x);
  return u * u;
}

/// Branch inverse of f on branch index m (m = 0 needs x >= 1).
inline double F_branch(int m, double x) {
  const double u = branch_root(m, x);
  return u * u;
}

/// Inverse of g on [0, inf); defined for x in (0, 1].
inline double G(double x) {
  if (!(x > 0.0 && x <= 1.0)) throw Error(ErrorKind::Domain, "G needs x in (0, 1]");
  if (x == 1.0) return 0.0;
  auto psi = [x](double v) { return std::tanh(v) - x * v; };  // positive left of the root
  double a = 0.0, b = 1.0 / x + 1.0;
  while (b - a > 1e-3) {
    const double mid = 0.5 * (a + b);
    if (psi(mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  double v = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double th = std::tanh(v);
    const double der = (1.0 - th * th) - x;
    double next = v - psi(v) / der;
    if (std::abs(next - v) <= 1e-15 * std::max(1.0, v)) {
      v = next;
      break;
    }
    if (!(next >= a && next <= b)) next = 0.5 * (a + b);
    v = next;
    if (psi(v) > 0.0)
      a = v;
    else
      b = v;
  }
  return v * v;
}

inline double F_branch_prime(int m, double x) { return 1.0 / f_prime(F_branch(m, x)); }
inline double G_prime(double x) { return 1.0 / g_prime(G(x)); }

/// Right-hand sides of the branch-inverse identities: F' = 2F/(1 + x^2 F - x), G' = 2G/(1 - x^2 G - x),
/// i.e. 1/F' = f'(F(x)) = (1 + x^2 F - x)/(2F).
inline double identity_F(double x, double Fx) { return 2.0 * Fx / (1.0 + x * x * Fx - x); }
inline double identity_G(double x, double Gx) { return 2.0 * Gx / (1.0 - x * x * Gx - x); }

struct BranchValues {
  double F1 = 0.0, F2 = 0.0, G = std::numeric_limits<double>::quiet_NaN();
};

inline BranchValues sl2_branch_functions(double x) {
  BranchValues b;
  b.F1 = F(1, x);
  b.F2 = F(2, x);
  if (x > 0.0 && x <= 1.0) b.G = G(x);
  return b;
}

struct CutReport {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  double argmin_r1 = 0.0;  // x location
  double argmin_r2 = 0.0;  // x location (infinity when the infimum is the x -> inf limit)
  double argmin_r3 = 0.0;  // h0 solving tan(h0/2)/h0 = 1/2
  double r2_error = 0.0;   // |r2 - 8 pi^2|
  double f1g_residual = 0.0;
  double stationarity_residual = 0.0;  // |F1'(1) + G'(1)|
  bool ordering_holds = false;         // r2 < r3 <= r1
  bool pass = false;
};

namespace detail {

// Central difference with one Richardson step.
template <class Fn>
double derivative(const Fn& f, double x, double h) {
  auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

}  // namespace detail

/// Max relative residual of the F and G derivative identities by finite differences on [lo, hi].
inline double f1g_identity_residual(double lo = 0.01, double hi = 50.0, int samples = 400) {
  double worst = 0.0;
  auto check = [&](auto&& fn, auto&& ident, double x) {
    const double h = 1e-3 * std::max(x, 1e-2);
    const double fd = detail::derivative(fn, x, h);
    const double rhs = ident(x, fn(x));
    worst = std::max(worst, std::abs(fd - rhs) / std::max(1.0, std::abs(rhs)));
  };
  for (int i = 0; i <= samples; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / samples);
    for (int m = 1; m <= 2; ++m)
      check([m](double s) { return F_branch(m, s); }, identity_F, x);
    if (x > 1.0 + 1e-3) check([](double s) { return F_branch(0, s); }, identity_F, x);
    if (x < 1.0 - 1e-3) check([](double s) { return G(s); }, identity_G, x);
  }
  return worst;
}

/// Cut-time infima r1 (tau < 0), r2 (tau > 0), r3 (tau = 0), in units of 2 H c^2.
inline CutReport sl2_cut_analysis(double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "tolerance must be positive");
  CutReport rep;

  // r3: tan(h/2)/h = 1/2  <=>  tan u = u with u = h/2 on the first nontrivial branch.
  const double u3 = branch_root(1, 1.0);
  rep.argmin_r3 = 2.0 * u3;
  rep.r3 = 4.0 * u3 * u3;

  // r1 = inf over x in (0,1) of 4(F1 + G); F1 lives on branch 1 there.
  auto obj1 = [](double x) { return 4.0 * (F_branch(1, x) + G(x)); };
  {
    double best = std::numeric_limits<double>::infinity(), best_x = 0.0;
    const int n = 200;
    for (int i = 1; i < n; ++i) {
      const double x = static_cast<double>(i) / n;
      const double v = obj1(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    const double a = std::max(1e-6, best_x - 1.0 / n), b = std::min(1.0, best_x + 1.0 / n);
    const auto res = boost::math::tools::brent_find_minima(obj1, a, b, 52);
    if (res.second < best) {
      best = res.second;
      best_x = res.first;
    }
    // endpoint x -> 1^-: G -> 0, F1 -> u3^2
    const double limit = 4.0 * F_branch(1, 1.0);
    if (limit <= best) {
      best = limit;
      best_x = 1.0;
    }
    rep.r1 = best;
    rep.argmin_r1 = best_x;
  }

  // r2 = inf 4(F2 - F1) over consecutive branches; the infimum is approached as x -> inf.
  {
    double best = std::numeric_limits<double>::infinity(), best_x = 0.0;
    auto pair_gap = [](double x) {
      const int first = x >= 1.0 ? 0 : 1;
      return 4.0 * (F_branch(first + 1, x) - F_branch(first, x));
    };
    for (int i = -200; i <= 800; ++i) {
      const double x = std::pow(10.0, i / 100.0);  // 1e-2 .. 1e8
      const double v = pair_gap(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    rep.r2 = best;
    rep.argmin_r2 = best_x >= 1e8 * (1.0 - 1e-12) ? std::numeric_limits<double>::infinity() : best_x;
  }

  rep.r2_error = std::abs(rep.r2 - 8.0 * kPi * kPi);
  rep.f1g_residual = f1g_identity_residual();
  rep.stationarity_residual = std::abs(1.0 / f_prime(0.0) + 1.0 / g_prime(0.0));
  rep.ordering_holds = rep.r2 < rep.r3 && rep.r3 <= rep.r1 + tol;
  rep.pass = rep.r2_error <= tol && rep.ordering_holds && rep.f1g_residual <= 1e-6;
  return rep;
}

}  // namespace cut

}  // namespace sascomp

#endif  // SASCOMP_MODELS_HPP
