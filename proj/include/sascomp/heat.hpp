#ifndef SASCOMP_HEAT_HPP
#define SASCOMP_HEAT_HPP

// Radial comparison equation  h_t = h'' + phi(s) h'  and the hypoelliptic heat
// equation u_t = (X1^2 + X2^2) u on the Heisenberg group, with the comparison
// u >= h(t, r(x)) checked pointwise.

#include "sascomp/distops.hpp"
#include "sascomp/kernels.hpp"
#include "sascomp/types.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace sascomp {

/// phi(s) = sqrt(k)(sin(s sqrt k) - s sqrt k cos(s sqrt k)) / (2 - 2 cos(s sqrt k) - s sqrt k sin(s sqrt k)),
/// and 4/s for k = 0. Written as e1(k s^2) / (s d2(k s^2)) so the k -> 0 limit is continuous.
inline double phi(double k, double s) {
  if (!(s > 0.0)) throw Error(ErrorKind::Domain, "phi needs s > 0");
  if (k < 0.0) throw Error(ErrorKind::Domain, "phi is only defined for k >= 0");
  const double x = k * s * s;
  if (x >= 4.0 * kPi * kPi * (1.0 - 1e-9))
    throw Error(ErrorKind::Pole, "s sqrt(k) is at or beyond the first pole of phi (2 pi)");
  return kernel::e1(x) / (s * kernel::d2(x));
}

/// The closed-form barrier (t + eps)^(-5/2) exp(-s^2 / (4 (t + eps))) for k = 0.
inline double remark_barrier(double t, double s, double eps) {
  const double T = t + eps;
  return std::pow(T, -2.5) * std::exp(-s * s / (4.0 * T));
}

/// h_t - h'' - (4/s) h' for the closed-form barrier, from analytic derivatives.
inline double remark_residual(double t, double s, double eps) {
  if (!(t >= 0.0 && s > 0.0 && eps > 0.0)) throw Error(ErrorKind::Domain, "need t >= 0, s > 0, eps > 0");
  const double T = t + eps;
  const double h = remark_barrier(t, s, eps);
  const double ht = h * (-2.5 / T + s * s / (4.0 * T * T));
  const double hs = -s / (2.0 * T) * h;
  const double hss = h * (s * s / (4.0 * T * T) - 0.5 / T);
  return ht - hss - hs * 4.0 / s;
}

// ---------------------------------------------------------------------------
// Radial comparison equation

struct RadialBarrier {
  double k = 0.0;
  std::vector<double> s;                   // s_0 = 0, uniform
  std::vector<double> t;                   // output times
  std::vector<std::vector<double>> h;      // h[time][node]
  std::vector<double> phi_samples;         // phi at s_j (j >= 1; entry 0 unused)
  double max_h_prime = -std::numeric_limits<double>::infinity();  // largest h' seen
  double derivative_equation_residual = 0.0;  // differentiated-equation diagnostic (relative)
  bool monotone = true;                    // h' <= 0 (up to roundoff) at every output time

  /// Linear interpolation in s at output index n; beyond the grid the last value is used.
  double value(std::size_t n, double sv) const {
    const double ds = s[1] - s[0];
    const double pos = sv / ds;
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, pos)), s.size() - 2);
    const double w = std::clamp(pos - static_cast<double>(j), 0.0, 1.0);
    return (1.0 - w) * h[n][j] + w * h[n][j + 1];
  }
};

struct RadialOptions {
  double s_max = 6.0;
  int nodes = 600;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
};

namespace detail {

// Fourth-order differences with even reflection at s = 0 and two boundary ghost nodes.
struct RadialOperator {
  double k, ds;
  std::vector<double> phi_j;  // phi(s_j), j >= 1

  template <class Get>
  std::pair<double, double> derivs(const Get& u, int j) const {
    const double d1 = (-u(j + 2) + 8.0 * u(j + 1) - 8.0 * u(j - 1) + u(j - 2)) / (12.0 * ds);
    const double d2 = (-u(j + 2) + 16.0 * u(j + 1) - 30.0 * u(j) + 16.0 * u(j - 1) - u(j - 2)) / (12.0 * ds * ds);
    return {d1, d2};
  }
};

}  // namespace detail

/// Method of lines on s in [0, s_max] (fourth-order in s, adaptive Fehlberg 7/8 in time).
/// s = 0 uses the even extension, where phi h' -> 4 h''. `outer(t, s)` supplies values at and
/// beyond s_max.
inline RadialBarrier solve_comparison_pde(double k, const std::function<double(double)>& h_init,
                                          const std::function<double(double, double)>& outer,
                                          const std::vector<double>& times, const RadialOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  if (times.empty()) throw Error(ErrorKind::InvalidConfig, "no output times");
  if (opt.nodes < 16) throw Error(ErrorKind::InvalidConfig, "radial grid needs at least 16 nodes");
  if (k < 0.0) throw Error(ErrorKind::Domain, "the comparison equation is only set up for k >= 0");
  if (k > 0.0 && opt.s_max * std::sqrt(k) >= kTwoPi)
    throw Error(ErrorKind::Domain, "s_max must stay below the first pole of phi, 2 pi / sqrt(k)");

  RadialBarrier out;
  out.k = k;
  const int N = opt.nodes;  // unknowns at j = 0..N-1, s_N = s_max is a boundary node
  const double ds = opt.s_max / N;
  for (int j = 0; j <= N; ++j) out.s.push_back(j * ds);
  detail::RadialOperator op{k, ds, std::vector<double>(N + 1, 0.0)};
  for (int j = 1; j <= N; ++j) op.phi_j[j] = phi(k, j * ds);
  out.phi_samples = op.phi_j;
  // 4 h''(0) is the limit of phi h' for every k >= 0: phi ~ 4/s near 0.

  using State = std::vector<double>;
  auto rhs = [&](const State& u, State& du, double t) {
    auto get = [&](int j) {
      if (j < 0) return u[-j];
      if (j >= N) return outer(t, j * ds);
      return u[j];
    };
    for (int j = 0; j < N; ++j) {
      const auto [d1, d2] = op.derivs(get, j);
      du[j] = j == 0 ? 5.0 * d2 : d2 + op.phi_j[j] * d1;
    }
  };

  State u(N);
  for (int j = 0; j < N; ++j) u[j] = h_init(j * ds);
  std::vector<double> ts = times;
  auto full_profile = [&](const State& s, double t) {
    std::vector<double> v(s.begin(), s.end());
    v.push_back(outer(t, opt.s_max));
    return v;
  };
  auto observer = [&](const State& s, double t) {
    out.t.push_back(t);
    out.h.push_back(full_profile(s, t));
  };
  if (ts.size() == 1) {
    observer(u, ts.front());
  } else {
    auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_fehlberg78<State>());
    odeint::integrate_times(stepper, rhs, u, ts.begin(), ts.end(), 1e-6, observer);
  }

  // Diagnostics: sign of h', and the s-differentiated equation d/dt h' = h''' + h'' phi + h' phi'.
  double scale = 0.0;
  for (std::size_t n = 0; n < out.h.size(); ++n) {
    const auto& hv = out.h[n];
    scale = std::max(scale, *std::max_element(hv.begin(), hv.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    }));
    for (int j = 1; j < N; ++j) {
      const double d1 = (hv[j + 1] - hv[j - 1]) / (2.0 * ds);
      out.max_h_prime = std::max(out.max_h_prime, d1);
    }
  }
  scale = std::max(std::abs(scale), 1e-300);
  out.monotone = out.max_h_prime <= 1e-9 * scale;

  // Fourth-order stencils; the residual is relative to the largest term of the equation.
  auto d1 = [ds](const auto& v, int j) { return (-v[j + 2] + 8.0 * v[j + 1] - 8.0 * v[j - 1] + v[j - 2]) / (12.0 * ds); };
  auto d2 = [ds](const auto& v, int j) {
    return (-v[j + 2] + 16.0 * v[j + 1] - 30.0 * v[j] + 16.0 * v[j - 1] - v[j - 2]) / (12.0 * ds * ds);
  };
  auto d3 = [ds](const auto& v, int j) {
    return (-v[j + 3] + 8.0 * v[j + 2] - 13.0 * v[j + 1] + 13.0 * v[j - 1] - 8.0 * v[j - 2] + v[j - 3]) /
           (8.0 * ds * ds * ds);
  };
  double worst = 0.0, term_scale = 0.0;
  for (std::size_t n = 0; n < out.h.size(); ++n) {
    State cur(out.h[n].begin(), out.h[n].begin() + N), dcur(N);
    rhs(cur, dcur, out.t[n]);
    const auto& hv = out.h[n];
    for (int j = 8; j < N - 4; ++j) {
      const double sj = j * ds;
      const double dphi = (-phi(k, sj + 2 * ds) + 8.0 * phi(k, sj + ds) - 8.0 * phi(k, sj - ds) +
                           phi(k, sj - 2 * ds)) / (12.0 * ds);
      const double a = d1(dcur, j), b = d3(hv, j), c = d2(hv, j) * op.phi_j[j], e = d1(hv, j) * dphi;
      worst = std::max(worst, std::abs(a - (b + c + e)));
      term_scale = std::max({term_scale, std::abs(a), std::abs(b), std::abs(c), std::abs(e)});
    }
  }
  out.derivative_equation_residual = term_scale > 0.0 ? worst / term_scale : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Hypoelliptic heat equation on the Heisenberg chart

struct HeatGrid {
  Vec3 lo = Vec3(-1.0, -1.0, -1.0);
  Vec3 hi = Vec3(1.0, 1.0, 1.0);
  int nx = 32, ny = 32, nz = 32;
  double dt = 0.0;  // 0 selects the stable step automatically
  double cfl = 0.9;
  int order = 2;    // 2 or 4: accuracy of the centred differences

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(l) * ny + j) * nx + i;
  }
  Vec3 spacing() const {
    return Vec3((hi(0) - lo(0)) / (nx - 1), (hi(1) - lo(1)) / (ny - 1), (hi(2) - lo(2)) / (nz - 1));
  }
  Vec3 point(int i, int j, int l) const {
    const Vec3 h = spacing();
    return Vec3(lo(0) + i * h(0), lo(1) + j * h(1), lo(2) + l * h(2));
  }
  Vec3 point(std::size_t idx) const {
    const int i = static_cast<int>(idx % nx);
    const int j = static_cast<int>((idx / nx) % ny);
    const int l = static_cast<int>(idx / (static_cast<std::size_t>(nx) * ny));
    return point(i, j, l);
  }
  /// Within `layers` nodes of a box face (the stencil half-width is order / 2).
  bool on_face(std::size_t idx, int layers = 1) const {
    const int i = static_cast<int>(idx % nx);
    const int j = static_cast<int>((idx / nx) % ny);
    const int l = static_cast<int>(idx / (static_cast<std::size_t>(nx) * ny));
    return std::min({i, j, l, nx - 1 - i, ny - 1 - j, nz - 1 - l}) < layers;
  }
};

/// Largest explicit Euler step for the centred X1^2 + X2^2 stencil at the updated nodes.
/// The coefficient matrix a is positive semidefinite with a_zz = (x^2 + y^2)/4, so the
/// frozen-coefficient symbol is at most (sum_i sqrt(a_ii) c / h_i)^2, where c^2 is the largest
/// symbol of the 1D second difference (4 for second order, 16/3 for fourth order).
inline double stable_heat_step(const HeatGrid& g, const std::vector<char>& interior) {
  const Vec3 h = g.spacing();
  const double c = g.order == 4 ? std::sqrt(16.0 / 3.0) : 2.0;
  double worst = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!interior[n]) continue;
    const Vec3 p = g.point(n);
    const double azz = 0.25 * (p(0) * p(0) + p(1) * p(1));
    const double b = c / h(0) + c / h(1) + c * std::sqrt(azz) / h(2);
    worst = std::max(worst, b * b);
  }
  return worst > 0.0 ? 2.0 / worst : std::numeric_limits<double>::infinity();
}

struct HeatSolution {
  HeatGrid grid;
  std::vector<char> interior;
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  double dt = 0.0;
  long steps = 0;
};

using HeatBoundary = std::function<double(double t, std::size_t idx)>;

/// Centred-difference value of X1^2 + X2^2 = d_xx + d_yy + (x^2 + y^2)/4 d_zz - y d_xz + x d_yz
/// at node n (chart coordinates x, y), second or fourth order per grid.order.
inline double heisenberg_sublaplacian(const HeatGrid& grid, const std::vector<double>& u, std::size_t n,
                                      double x, double y) {
  const Vec3 h = grid.spacing();
  const std::ptrdiff_t sx = 1, sy = grid.nx, sz = static_cast<std::ptrdiff_t>(grid.nx) * grid.ny;
  const double* p = u.data() + n;
  double fxx = 0.0, fyy = 0.0, fzz = 0.0, fxz = 0.0, fyz = 0.0;
  if (grid.order == 2) {
    const double c = p[0];
    fxx = (p[sx] - 2.0 * c + p[-sx]) / (h(0) * h(0));
    fyy = (p[sy] - 2.0 * c + p[-sy]) / (h(1) * h(1));
    fzz = (p[sz] - 2.0 * c + p[-sz]) / (h(2) * h(2));
    fxz = (p[sx + sz] - p[sx - sz] - p[-sx + sz] + p[-sx - sz]) / (4.0 * h(0) * h(2));
    fyz = (p[sy + sz] - p[sy - sz] - p[-sy + sz] + p[-sy - sz]) / (4.0 * h(1) * h(2));
  } else {
    // first derivative weights (offsets -2..2) over 12 h; second derivative over 12 h^2
    constexpr double w1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
    constexpr double w2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
    for (int o = -2; o <= 2; ++o) {
      fxx += w2[o + 2] * p[o * sx];
      fyy += w2[o + 2] * p[o * sy];
      fzz += w2[o + 2] * p[o * sz];
      if (o == 0) continue;
      for (int q = -2; q <= 2; ++q) {
        if (q == 0) continue;
        const double w = w1[o + 2] * w1[q + 2];
        fxz += w * p[o * sx + q * sz];
        fyz += w * p[o * sy + q * sz];
      }
    }
    fxx /= 12.0 * h(0) * h(0);
    fyy /= 12.0 * h(1) * h(1);
    fzz /= 12.0 * h(2) * h(2);
    fxz /= 144.0 * h(0) * h(2);
    fyz /= 144.0 * h(1) * h(2);
  }
  return fxx + fyy + 0.25 * (x * x + y * y) * fzz - y * fxz + x * fyz;
}

/// Explicit Euler in time with centred differences (second or fourth order) for
///   X1^2 + X2^2 = d_xx + d_yy + (x^2 + y^2)/4 d_zz - y d_xz + x d_yz.
/// Nodes where `interior` is zero carry Dirichlet data from `boundary`; nodes closer to a face
/// than the stencil half-width must be boundary nodes.
inline HeatSolution solve_sr_heat(const HeatGrid& grid, const std::vector<char>& interior,
                                  const std::vector<double>& u_init, const HeatBoundary& boundary,
                                  const std::vector<double>& snapshot_times) {
  if (grid.nx < 5 || grid.ny < 5 || grid.nz < 5) throw Error(ErrorKind::InvalidConfig, "heat grid too small");
  if (interior.size() != grid.size() || u_init.size() != grid.size())
    throw Error(ErrorKind::InvalidConfig, "heat grid and field sizes differ");
  if (grid.order != 2 && grid.order != 4) throw Error(ErrorKind::InvalidConfig, "stencil order must be 2 or 4");
  const int half = grid.order / 2;
  for (std::size_t n = 0; n < grid.size(); ++n)
    if (interior[n] && grid.on_face(n, half))
      throw Error(ErrorKind::InvalidConfig, "nodes within the stencil width of a face must be Dirichlet nodes");
  if (snapshot_times.empty() || !std::is_sorted(snapshot_times.begin(), snapshot_times.end()) ||
      snapshot_times.front() < 0.0)
    throw Error(ErrorKind::InvalidConfig, "snapshot times must be sorted and nonnegative");

  const double limit = stable_heat_step(grid, interior);
  double dt = grid.dt > 0.0 ? grid.dt : grid.cfl * limit;
  if (dt > limit) throw Error(ErrorKind::Stability, "time step exceeds the stability bound");

  HeatSolution sol;
  sol.grid = grid;
  sol.interior = interior;

  std::vector<std::size_t> active;
  std::vector<double> cx, cy;  // x, y at active nodes
  for (std::size_t n = 0; n < grid.size(); ++n)
    if (interior[n]) {
      active.push_back(n);
      const Vec3 p = grid.point(n);
      cx.push_back(p(0));
      cy.push_back(p(1));
    }
  std::vector<std::size_t> fixed;
  for (std::size_t n = 0; n < grid.size(); ++n)
    if (!interior[n]) fixed.push_back(n);

  std::vector<double> u = u_init, next(grid.size());
  double sup0 = 0.0;
  for (double v : u) sup0 = std::max(sup0, std::abs(v));
  auto apply_boundary = [&](std::vector<double>& f, double t) {
    for (std::size_t n : fixed) f[n] = boundary(t, n);
  };
  apply_boundary(u, 0.0);

  double t = 0.0;
  std::size_t snap = 0;
  auto record = [&]() {
    while (snap < snapshot_times.size() && snapshot_times[snap] <= t + 1e-12 * std::max(1.0, t)) {
      sol.times.push_back(t);
      sol.snapshots.push_back(u);
      ++snap;
    }
  };
  record();
  const double t_end = snapshot_times.back();
  while (snap < snapshot_times.size()) {
    const double step = std::min(dt, snapshot_times[snap] - t);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t n = active[a];
      next[n] = u[n] + step * heisenberg_sublaplacian(grid, u, n, cx[a], cy[a]);
    }
    t += step;
    ++sol.steps;
    for (std::size_t n : active) u[n] = next[n];
    apply_boundary(u, t);
    if (sol.steps % 64 == 0) {
      double sup = 0.0;
      for (std::size_t n : active) sup = std::max(sup, std::abs(u[n]));
      if (!(sup <= 1e6 * std::max(1.0, sup0)))
        throw Error(ErrorKind::Stability, "heat solution blew up at t = " + std::to_string(t));
    }
    record();
    if (t > t_end * (1.0 + 1e-12) + 1e-300) break;
  }
  sol.dt = dt;
  return sol;
}

/// Lebesgue (= eta) mass of a field over the grid, trapezoid-free cell sum.
inline double heat_mass(const HeatGrid& g, const std::vector<double>& u) {
  const Vec3 h = g.spacing();
  double m = 0.0;
  for (double v : u) m += v;
  return m * h(0) * h(1) * h(2);
}

/// Pointwise check of u(t, x) >= h(t, r(x)) - tol on the interior nodes of every snapshot, with the
/// hypotheses (initial data and Dirichlet data above the barrier) checked first.
inline ComparisonReport cheeger_yau_check(const HeatSolution& sol,
                                          const std::function<double(double, double)>& barrier,
                                          const std::vector<double>& r_field, double tol = 1e-6) {
  ComparisonReport rep;
  rep.name = "cheeger_yau";
  rep.tolerance = tol;
  if (r_field.size() != sol.grid.size()) throw Error(ErrorKind::InvalidConfig, "r field size mismatch");
  for (std::size_t s = 0; s < sol.snapshots.size(); ++s) {
    const double t = sol.times[s];
    const auto& u = sol.snapshots[s];
    double interior_margin = std::numeric_limits<double>::infinity();
    double boundary_margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < u.size(); ++n) {
      const double m = u[n] - barrier(t, r_field[n]);
      (sol.interior[n] ? interior_margin : boundary_margin) = std::min(sol.interior[n] ? interior_margin
                                                                                       : boundary_margin,
                                                                       m);
    }
    if (boundary_margin < -tol || (s == 0 && interior_margin < -tol)) {
      rep.hypotheses_hold = false;
      rep.notes.push_back("data below the barrier at t = " + std::to_string(t) +
                          (s == 0 ? " (initial)" : " (boundary)"));
    }
    rep.add("u - h(t, r) on interior", t, interior_margin, 0.0, interior_margin);
  }
  return rep;
}

/// Overload with a computed radial barrier; snapshot times must match the barrier's output times.
inline ComparisonReport cheeger_yau_check(const HeatSolution& sol, const RadialBarrier& barrier,
                                          const std::vector<double>& r_field, double tol = 1e-6) {
  auto at = [&barrier](double t, double s) {
    std::size_t best = 0;
    for (std::size_t n = 1; n < barrier.t.size(); ++n)
      if (std::abs(barrier.t[n] - t) < std::abs(barrier.t[best] - t)) best = n;
    if (std::abs(barrier.t[best] - t) > 1e-9 * std::max(1.0, t))
      throw Error(ErrorKind::InvalidConfig, "barrier has no output at t = " + std::to_string(t));
    return barrier.value(best, s);
  };
  return cheeger_yau_check(sol, at, r_field, tol);
}

// ---------------------------------------------------------------------------
// The full Heisenberg pipeline: annulus r_in <= r <= r_out around the origin, closed-form
// barrier on the inner ball and outside r_out, initial data equal to the barrier.

struct CheegerYauSetup {
  int n = 64;            // nodes per axis
  int order = 4;         // stencil order
  double eps = 0.1;
  double r_in = 0.5;
  double r_out = 3.0;
  double t_end = 0.25;
  int snapshots = 50;    // checked time levels, uniformly spaced
  double tol = 1e-6;
};

struct CheegerYauRun {
  HeatSolution solution;
  std::vector<double> r_field;
  ComparisonReport report;
};

inline CheegerYauRun cheeger_yau_pipeline(const CheegerYauSetup& cfg) {
  if (!(cfg.r_in > 0.0 && cfg.r_out > cfg.r_in && cfg.eps > 0.0 && cfg.t_end > 0.0 && cfg.snapshots >= 1))
    throw Error(ErrorKind::InvalidConfig, "invalid Cheeger-Yau setup");
  CheegerYauRun run;
  HeatGrid g;
  const double xy = cfg.r_out * 1.05;
  const double zmax = cfg.r_out * cfg.r_out / (4.0 * kPi) * 1.1;
  g.lo = Vec3(-xy, -xy, -zmax);
  g.hi = Vec3(xy, xy, zmax);
  g.nx = g.ny = g.nz = cfg.n;
  g.order = cfg.order;
  run.r_field.resize(g.size());
  std::vector<char> interior(g.size(), 0);
  std::vector<double> u0(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double r = heisenberg_distance(g.point(n));
    run.r_field[n] = r;
    interior[n] = !g.on_face(n, cfg.order / 2) && r > cfg.r_in && r < cfg.r_out;
    u0[n] = remark_barrier(0.0, r, cfg.eps);
  }
  const auto& rf = run.r_field;
  const double eps = cfg.eps;
  HeatBoundary bnd = [&rf, eps](double t, std::size_t n) { return remark_barrier(t, rf[n], eps); };
  std::vector<double> times;
  for (int i = 0; i <= cfg.snapshots; ++i) times.push_back(cfg.t_end * i / cfg.snapshots);
  run.solution = solve_sr_heat(g, interior, u0, bnd, times);
  run.report = cheeger_yau_check(
      run.solution, [eps](double t, double s) { return remark_barrier(t, s, eps); }, run.r_field, cfg.tol);
  return run;
}

}  // namespace sascomp

#endif  // SASCOMP_HEAT_HPP
