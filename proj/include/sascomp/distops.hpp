#ifndef SASCOMP_DISTOPS_HPP
#define SASCOMP_DISTOPS_HPP

// Subriemannian distance by shooting, the subriemannian Hessian matrix in the
// projected Darboux basis, and the space-form Hessian / sub-Laplacian formulas.

#include "sascomp/geoflow.hpp"
#include "sascomp/kernels.hpp"
#include "sascomp/models.hpp"
#include "sascomp/types.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace sascomp {

struct DistanceOptions {
  FlowOptions flow{1e-13};
  double residual_tol = 1e-11;  // frame-coordinate norm of the endpoint mismatch
  int max_newton = 60;
  int grid = 8;                 // multistart grid per axis in (h0, theta)
  int radial_levels = 6;        // r levels scanned around the predicted length
  int starts = 6;               // best pre-screened seeds refined by Newton
};

struct ShootingCandidate {
  Vec3 alpha = Vec3::Zero();      // initial covector at x0 (frame momenta)
  Vec3 alpha_end = Vec3::Zero();  // covector at the target, lambda(1)
  double r = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

struct DistanceResult {
  double r = 0.0;
  Vec3 alpha = Vec3::Zero();
  Vec3 alpha_end = Vec3::Zero();
  double v0r = 0.0;  // Reeb derivative of r at the target
  double residual = 0.0;
  bool in_domain = false;
  bool ambiguous = false;  // several minimizers of equal length found
  std::vector<ShootingCandidate> candidates;
};

namespace detail {

template <class Space>
Vec3 shooting_residual(const Space& space, const typename Space::Point& target,
                       const typename Space::Point& end) {
  using Point = typename Space::Point;
  return space.frame_coordinates(target, Point(end - target));
}

/// Damped Gauss-Newton on alpha -> exp_1(alpha) = target.
template <class Space>
ShootingCandidate newton_shoot(const Space& space, const typename Space::Point& x0,
                               const typename Space::Point& target, Vec3 alpha,
                               const DistanceOptions& opt) {
  using Point = typename Space::Point;
  ShootingCandidate c;
  std::vector<double> grid;
  auto evaluate = [&](const Vec3& a, std::vector<double>* g, CovectorState<Point>* end) {
    const auto e = flow(space, CovectorState<Point>{x0, a}, 1.0, opt.flow, g);
    if (end) *end = e;
    return shooting_residual(space, target, e.x);
  };
  CovectorState<Point> end;
  Vec3 res;
  try {
    res = evaluate(alpha, &grid, &end);
  } catch (const Error&) {
    return c;
  }
  for (int it = 0; it < opt.max_newton; ++it) {
    c.iterations = it;
    if (res.norm() <= opt.residual_tol) break;
    Mat3 J;
    const double d = 1e-7 * std::max(1.0, alpha.norm());
    for (int j = 0; j < 3; ++j) {
      Vec3 p = alpha, m = alpha;
      p(j) += d;
      m(j) -= d;
      const Point xp = flow_on_grid(space, CovectorState<Point>{x0, p}, grid).x;
      const Point xm = flow_on_grid(space, CovectorState<Point>{x0, m}, grid).x;
      J.col(j) = (shooting_residual(space, target, xp) - shooting_residual(space, target, xm)) / (2.0 * d);
    }
    const Vec3 step = -J.completeOrthogonalDecomposition().solve(res);
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec3 trial = alpha + lambda * step;
      try {
        std::vector<double> g2;
        CovectorState<Point> e2;
        const Vec3 r2 = evaluate(trial, &g2, &e2);
        if (r2.norm() < res.norm()) {
          alpha = trial;
          res = r2;
          grid = std::move(g2);
          end = e2;
          improved = true;
          break;
        }
      } catch (const Error&) {
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  c.alpha = alpha;
  c.alpha_end = end.h;
  c.r = std::hypot(alpha(1), alpha(2));
  c.residual = res.norm();
  c.converged = c.residual <= opt.residual_tol;
  return c;
}

/// Length scale predicted from the frame coordinates (c0, c1, c2) of the displacement:
/// sqrt(c1^2 + c2^2 + 4 pi |c0|), exact on the Heisenberg axis and on horizontal lines.
template <class Space>
double predicted_length(const Space& space, const typename Space::Point& x0,
                        const typename Space::Point& target) {
  using Point = typename Space::Point;
  const Vec3 c = space.frame_coordinates(x0, Point(target - x0));
  return std::sqrt(c(1) * c(1) + c(2) * c(2) + 4.0 * kPi * std::abs(c(0)));
}

inline InjectivityDomain search_domain(const ModelSpace& m, double r) {
  InjectivityDomain dom{m.kind, m.c, std::max(r, 1e-12)};
  return dom;
}

}  // namespace detail

/// Single shooting from a guess (warm start). Throws NonConvergence on failure.
template <class Space>
DistanceResult distance_from_guess(const Space& space, const ModelSpace& m, const typename Space::Point& x0,
                                   const typename Space::Point& x, const Vec3& guess,
                                   const DistanceOptions& opt = {}) {
  const auto c = detail::newton_shoot(space, x0, x, guess, opt);
  if (!c.converged)
    throw Error(ErrorKind::NonConvergence, "shooting from the supplied guess did not converge");
  DistanceResult d;
  d.r = c.r;
  d.alpha = c.alpha;
  d.alpha_end = c.alpha_end;
  d.v0r = c.r > 0.0 ? c.alpha_end(0) / c.r : 0.0;
  d.residual = c.residual;
  const auto [lo, hi] = detail::search_domain(m, c.r).h_range(c.r);
  d.in_domain = std::abs(c.alpha(0)) < hi && std::abs(c.alpha(0)) > lo;
  d.candidates.push_back(c);
  return d;
}

/// Carnot-Caratheodory distance from x0 to x by multistart shooting inside the injectivity domain.
template <class Space>
DistanceResult distance(const Space& space, const ModelSpace& m, const typename Space::Point& x0,
                        const typename Space::Point& x, const DistanceOptions& opt = {}) {
  using Point = typename Space::Point;
  DistanceResult out;
  const double scale = detail::predicted_length(space, x0, x);
  if (scale == 0.0) return out;

  // Pre-screen an (r, h0, theta) grid by endpoint mismatch.
  struct Seed {
    Vec3 alpha;
    double mismatch;
  };
  std::vector<Seed> seeds;
  for (int lr = 0; lr < opt.radial_levels; ++lr) {
    const double r = scale * (0.4 + 1.2 * lr / std::max(1, opt.radial_levels - 1));
    const auto [lo, hi] = detail::search_domain(m, r).h_range(r);
    if (!(hi > lo)) continue;
    for (int ih = 0; ih < opt.grid; ++ih) {
      const double mag = lo + (hi - lo) * (ih + 0.5) / opt.grid;
      for (double h0 : {mag, -mag})
        for (int it = 0; it < opt.grid; ++it) {
          const double th = kTwoPi * it / opt.grid;
          const Vec3 a(h0, r * std::cos(th), r * std::sin(th));
          try {
            const Point e = exp_map(space, x0, a, 1.0, FlowOptions{1e-8});
            seeds.push_back({a, space.difference(e, x).norm()});
          } catch (const Error&) {
          }
        }
    }
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.mismatch < b.mismatch; });
  const std::size_t n = std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(opt.starts));
  for (std::size_t i = 0; i < n; ++i) out.candidates.push_back(detail::newton_shoot(space, x0, x, seeds[i].alpha, opt));

  const ShootingCandidate* best = nullptr;
  for (const auto& c : out.candidates)
    if (c.converged && space.difference(exp_map(space, x0, c.alpha, 1.0, opt.flow), x).norm() < 1e-8 &&
        (!best || c.r < best->r))
      best = &c;
  if (!best) throw Error(ErrorKind::NonConvergence, "no shooting candidate reached the target");
  for (const auto& c : out.candidates)
    if (c.converged && &c != best && std::abs(c.r - best->r) <= 1e-7 * std::max(1.0, best->r) &&
        (c.alpha - best->alpha).norm() > 1e-5 * std::max(1.0, best->alpha.norm()))
      out.ambiguous = true;
  out.r = best->r;
  out.alpha = best->alpha;
  out.alpha_end = best->alpha_end;
  out.v0r = best->r > 0.0 ? best->alpha_end(0) / best->r : 0.0;
  out.residual = best->residual;
  const auto [lo, hi] = detail::search_domain(m, best->r).h_range(best->r);
  out.in_domain = !out.ambiguous && std::abs(best->alpha(0)) < hi && std::abs(best->alpha(0)) >= lo;
  return out;
}

/// Heisenberg distance from the origin in closed form: with theta = |h0| the turning angle,
/// rho = r 2 sin(theta/2)/theta and |z| = r^2 (theta - sin theta)/(2 theta^2).
inline double heisenberg_distance(const Vec3& p) {
  const double rho2 = p(0) * p(0) + p(1) * p(1);
  const double z = std::abs(p(2));
  if (z == 0.0) return std::sqrt(rho2);
  if (rho2 == 0.0) return std::sqrt(4.0 * kPi * z);
  // q(theta) = (theta - sin theta)/(8 sin^2(theta/2)) increases from 0 to infinity on [0, 2 pi)
  const double target = z / rho2;
  auto q = [](double th) {
    if (th < 1e-3) return th / 12.0 + th * th * th / 720.0;
    const double s = std::sin(0.5 * th);
    return (th - std::sin(th)) / (8.0 * s * s);
  };
  double a = 0.0, b = kTwoPi;
  for (int i = 0; i < 200 && b - a > 1e-15 * kTwoPi; ++i) {
    const double mid = 0.5 * (a + b);
    (q(mid) < target ? a : b) = mid;
  }
  const double th = 0.5 * (a + b);
  const double factor = th < 1e-8 ? 1.0 : th / (2.0 * std::sin(0.5 * th));
  return std::sqrt(rho2) * factor;
}

// ---------------------------------------------------------------------------
// Subriemannian Hessian

struct HessianMatrix {
  Mat3 H = Mat3::Zero();       // entries in the projected Darboux basis
  Vec3 grad = Vec3::Zero();    // (v0 f, v1 f, v2 f)
  Mat3 second = Mat3::Zero();  // second(i, j) = v_i v_j f
  double symmetry_residual = 0.0;  // max |v_i v_j f - v_j v_i f - [v_i, v_j] f|
  double laplacian = 0.0;          // sub-Laplacian (v1^2 + v2^2 + a_12^1 v2 - a_12^2 v1) f
  double trace_residual = 0.0;     // |tr(C2 H) - laplacian|
};

/// Hessian matrix entries of a Sasakian frame from first and second frame derivatives.
inline HessianMatrix hessian_from_derivatives(const StructureConstants& a, const Vec3& g, const Mat3& D) {
  const double g0 = g(0), g1 = g(1), g2 = g(2);
  const double den = g1 * g1 + g2 * g2;
  if (!(den > 1e-14 * std::max(1.0, g.squaredNorm())))
    throw Error(ErrorKind::Domain, "horizontal gradient vanishes; the Hessian matrix is undefined");
  HessianMatrix out;
  out.grad = g;
  out.second = D;
  Mat3& H = out.H;
  H(0, 0) = (g1 * g1 * D(2, 2) + g2 * g2 * D(1, 1) - g1 * g2 * (D(1, 2) + D(2, 1))) / den + a(1, 2, 1) * g2 -
            a(1, 2, 2) * g1;
  H(0, 2) = (g1 * g2 * (D(1, 1) - D(2, 2)) - g1 * g1 * D(2, 1) + g2 * g2 * D(1, 2)) / den;
  H(2, 2) = (g1 * g1 * D(1, 1) + g1 * g2 * (D(2, 1) + D(1, 2)) + g2 * g2 * D(2, 2)) / den;
  H(0, 1) = g1 * D(2, 0) - g2 * D(1, 0) + g0 * H(0, 2);
  H(1, 2) = g0 * H(2, 2) - g1 * D(0, 1) - g2 * D(0, 2);
  H(1, 1) = den * D(0, 0) - g0 * g1 * D(1, 0) - g0 * g2 * D(2, 0) + g0 * H(1, 2);
  H(1, 0) = H(0, 1);
  H(2, 0) = H(0, 2);
  H(2, 1) = H(1, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double bracket = 0.0;
      for (int k = 0; k < 3; ++k) bracket += a(i, j, k) * g(k);
      out.symmetry_residual = std::max(out.symmetry_residual, std::abs(D(i, j) - D(j, i) - bracket));
    }
  out.laplacian = D(1, 1) + D(2, 2) + a(1, 2, 1) * g2 - a(1, 2, 2) * g1;
  out.trace_residual = std::abs(H(0, 0) + H(2, 2) - out.laplacian);
  return out;
}

struct HessianFdOptions {
  double step = 1e-3;  // largest displacement along the frame fields; two Richardson levels
};

/// Hessian of a field whose frame gradient (v0 f, v1 f, v2 f) is available pointwise.
template <class Space>
HessianMatrix sr_hessian_fd(const Space& space,
                            const std::function<Vec3(const typename Space::Point&)>& frame_gradient,
                            const typename Space::Point& x, const HessianFdOptions& opt = {}) {
  const Vec3 g = frame_gradient(x);
  Mat3 D;
  auto diff = [&](int i, double e) {
    return Vec3((frame_gradient(space.move(x, i, e)) - frame_gradient(space.move(x, i, -e))) / (2.0 * e));
  };
  for (int i = 0; i < 3; ++i) {
    const Vec3 d1 = diff(i, opt.step), d2 = diff(i, 0.5 * opt.step), d4 = diff(i, 0.25 * opt.step);
    const Vec3 r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d4 - d2) / 3.0;
    D.row(i) = ((16.0 * r2 - r1) / 15.0).transpose();
  }
  return hessian_from_derivatives(space.structure(x), g, D);
}

/// Hessian of a field given by values only; the gradient is itself a finite difference.
template <class Space>
HessianMatrix sr_hessian_fd_values(const Space& space,
                                   const std::function<double(const typename Space::Point&)>& f,
                                   const typename Space::Point& x, double step = 1e-3) {
  const double inner = 0.1 * step;
  auto grad = [&](const typename Space::Point& p) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
      auto d = [&](double e) { return (f(space.move(p, i, e)) - f(space.move(p, i, -e))) / (2.0 * e); };
      g(i) = (4.0 * d(0.5 * inner) - d(inner)) / 3.0;
    }
    return g;
  };
  return sr_hessian_fd<Space>(space, grad, x, HessianFdOptions{step});
}

/// Frame gradient of ds = -r^2/2 at a point: d(ds) is minus the arrival covector of the
/// minimizing geodesic from x0, so v_i ds = -h_i(lambda(1)).
template <class Space>
std::function<Vec3(const typename Space::Point&)> ds_gradient(const Space& space, const ModelSpace& m,
                                                              const typename Space::Point& x0, Vec3 guess,
                                                              const DistanceOptions& opt = {}) {
  return [&space, m, x0, guess, opt](const typename Space::Point& p) -> Vec3 {
    const auto d = distance_from_guess(space, m, x0, p, guess, opt);
    return -d.alpha_end;
  };
}

/// Hessian matrix of ds at x, given a converged distance result there.
template <class Space>
HessianMatrix ds_hessian(const Space& space, const ModelSpace& m, const typename Space::Point& x0,
                         const typename Space::Point& x, const DistanceResult& at_x,
                         const HessianFdOptions& opt = {}, const DistanceOptions& dopt = {}) {
  const auto grad = ds_gradient(space, m, x0, at_x.alpha, dopt);
  return sr_hessian_fd<Space>(space, grad, x, opt);
}

/// Hessian matrix of ds on the space form of curvature k, sigma = (v0 ds)^2 - 2 k ds.
inline Mat3 hessian_space_form(double k, double ds_val, double v0ds_val) {
  if (ds_val > 0.0) throw Error(ErrorKind::Domain, "ds = -r^2/2 must be nonpositive");
  double sigma = v0ds_val * v0ds_val - 2.0 * k * ds_val;
  if (kernel::classify(sigma, std::max(v0ds_val * v0ds_val, 2.0 * std::abs(k * ds_val))) ==
      kernel::Branch::Parabolic)
    sigma = 0.0;
  const double d = kernel::d2(sigma);
  if (std::abs(d) <= 1e-14) throw Error(ErrorKind::ConjugatePoint, "conjugate denominator vanishes");
  Mat3 h = Mat3::Zero();
  h(0, 0) = -kernel::e1(sigma) / d;
  h(0, 1) = h(1, 0) = -kernel::c1(sigma) / d;
  h(1, 1) = -kernel::sinc(sigma) / d;
  h(2, 2) = -1.0;
  return h;
}

/// Sub-Laplacian of r on the space form of curvature k, sigma = r^2((v0 r)^2 + k).
inline double sublaplacian_r_space_form(double k, double r, double v0r) {
  if (!(r > 0.0)) throw Error(ErrorKind::Domain, "r must be positive");
  double sigma = r * r * (v0r * v0r + k);
  if (kernel::classify(sigma, r * r * std::max(v0r * v0r, std::abs(k))) == kernel::Branch::Parabolic)
    sigma = 0.0;
  const double d = kernel::d2(sigma);
  if (std::abs(d) <= 1e-14) throw Error(ErrorKind::ConjugatePoint, "conjugate denominator vanishes");
  return kernel::e1(sigma) / (r * d);
}

/// Sub-Laplacian of r from the Hessian of ds: Delta_H ds = -r Delta_H r - 1.
inline double sublaplacian_r_from_ds(const HessianMatrix& hds, double r) { return (-hds.laplacian - 1.0) / r; }

inline double min_symmetric_eigenvalue(const Mat3& m) {
  const Mat3 s = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat3>(s, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Initial covectors well inside the injectivity domain: r in [0.4, 1.4], |h| in the middle
/// of its admissible range, uniform angle. Their time-one images stay away from the cut locus
/// and from the Reeb axis through the origin.
inline std::vector<Vec3> sample_interior_covectors(const ModelSpace& m, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  while (static_cast<int>(out.size()) < n) {
    const double r = 0.4 + U(rng);
    const auto [lo, hi] = InjectivityDomain{m.kind, m.c, 10.0}.h_range(r);
    const double span = hi - lo;
    const double h = (lo + 0.15 * span + 0.55 * span * U(rng)) * (U(rng) < 0.5 ? -1.0 : 1.0);
    const double th = kTwoPi * U(rng);
    out.emplace_back(h, r * std::cos(th), r * std::sin(th));
  }
  return out;
}

struct HessianSample {
  Vec3 alpha = Vec3::Zero();
  double r = 0.0;
  double v0r = 0.0;
  Mat3 fd = Mat3::Zero();          // finite-difference Hessian of ds
  Mat3 space_form = Mat3::Zero();  // closed form on the model
  double entry_error = 0.0;        // relative_entry_error(fd, space_form)
  double symmetry_residual = 0.0;
  double trace_residual = 0.0;
  double laplacian_r_fd = 0.0;
  double laplacian_r_formula = 0.0;
};

/// Finite-difference Hessian of ds against the closed form at the time-one image of alpha.
template <class Space>
HessianSample hessian_sample(const Space& space, const ModelSpace& m, const Vec3& alpha) {
  HessianSample s;
  s.alpha = alpha;
  const auto x0 = space.origin();
  const auto z = exp_map(space, x0, alpha, 1.0, FlowOptions{1e-13});
  const auto d = distance_from_guess(space, m, x0, z, alpha);
  const auto h = ds_hessian(space, m, x0, z, d);
  s.r = d.r;
  s.v0r = d.v0r;
  s.fd = h.H;
  s.space_form = hessian_space_form(m.k(), -0.5 * d.r * d.r, -d.alpha_end(0));
  s.entry_error = relative_entry_error(h.H, s.space_form);
  s.symmetry_residual = h.symmetry_residual;
  s.trace_residual = h.trace_residual;
  s.laplacian_r_fd = sublaplacian_r_from_ds(h, d.r);
  s.laplacian_r_formula = sublaplacian_r_space_form(m.k(), d.r, d.v0r);
  return s;
}

/// Laplacian and Hessian comparison on a model against the space form of curvature k.
/// Samples are initial covectors at the model origin; the target points are their
/// time-one images. If the model curvature is >= k the margins are
///   formula - Delta_H r  and  min eig(Hess ds - formula),
/// otherwise their negatives.
template <class Space>
ComparisonReport laplacian_compare(const Space& space, const ModelSpace& m, double k,
                                   const std::vector<Vec3>& samples, double tol = 1e-5) {
  using Point = typename Space::Point;
  ComparisonReport rep;
  rep.name = "laplacian_compare";
  rep.tolerance = tol;
  const double sign = m.k() >= k ? 1.0 : -1.0;
  const Point x0 = space.origin();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Point z = exp_map(space, x0, samples[i], 1.0, FlowOptions{1e-13});
    DistanceResult d;
    try {
      d = distance_from_guess(space, m, x0, z, samples[i]);
    } catch (const Error& e) {
      rep.notes.push_back(std::string("sample skipped: ") + e.what());
      continue;
    }
    const auto hds = ds_hessian(space, m, x0, z, d);
    const double lap = sublaplacian_r_from_ds(hds, d.r);
    const double bound = sublaplacian_r_space_form(k, d.r, d.v0r);
    rep.add("Delta_H r vs space form", static_cast<double>(i), lap, bound, sign * (bound - lap));
    const Mat3 bound_h = hessian_space_form(k, -0.5 * d.r * d.r, -d.alpha_end(0));
    rep.add("Hess ds vs space form", static_cast<double>(i), hds.H(0, 0), bound_h(0, 0),
            min_symmetric_eigenvalue(sign * (hds.H - bound_h)));
  }
  return rep;
}

}  // namespace sascomp

#endif  // SASCOMP_DISTOPS_HPP
