#ifndef SASCOMP_RICCATI_HPP
#define SASCOMP_RICCATI_HPP

// Jacobi matrices along a Sasakian geodesic and the Riccati flows they induce.
//
//   A' = -A C1 + B R,   B' = -A C2 + B C1^T,   A_0 = I, B_0 = 0,
//   U = A^{-1} B:  U' = -U R U + C1 U + U C1^T - C2,  U_0 = 0,
//   S = B^{-1} A = U^{-1}.
//
// In the Sasakian case R_t = diag(h0^2 + 2 kappa_t H, 0, 0).

#include "sascomp/kernels.hpp"
#include "sascomp/types.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace sascomp {

inline Mat3 jacobi_C1() {
  Mat3 c = Mat3::Zero();
  c(1, 0) = 1.0;
  return c;
}

inline Mat3 jacobi_C2() { return Vec3(1.0, 0.0, 1.0).asDiagonal(); }

struct CurvatureProfile {
  std::function<Mat3(double)> R;

  Mat3 operator()(double t) const { return R(t); }
};

/// R_t = diag(h0^2 + 2 kappa(t) H, 0, 0).
inline CurvatureProfile sasakian_profile(double h0, double H, std::function<double(double)> kappa) {
  return {[h0, H, kappa = std::move(kappa)](double t) {
    Mat3 r = Mat3::Zero();
    r(0, 0) = h0 * h0 + 2.0 * kappa(t) * H;
    return r;
  }};
}

inline CurvatureProfile constant_profile(double k, double h0, double H) {
  return sasakian_profile(h0, H, [k](double) { return k; });
}

struct JacobiMatrices {
  std::vector<double> times;
  std::vector<Mat3> A, B;

  Mat3 U(std::size_t i) const { return A[i].partialPivLu().solve(B[i]); }
  Mat3 S(std::size_t i) const { return B[i].partialPivLu().solve(A[i]); }
};

namespace detail {

using Mat3State = std::array<double, 9>;
using PairState = std::array<double, 18>;

inline Mat3 to_mat(const double* p) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = p[3 * i + j];
  return m;
}

inline void from_mat(const Mat3& m, double* p) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p[3 * i + j] = m(i, j);
}

// Linear system tolerances: relative control with a tiny absolute floor, since
// det B_t ~ t^5 near t = 0 and ratios of such determinants are compared.
inline constexpr double kAbsTol = 1e-16;
inline constexpr double kRelTol = 1e-13;

}  // namespace detail

/// Solves the (A, B) system and samples it at the given increasing times.
inline JacobiMatrices integrate_AB(const CurvatureProfile& profile, const Mat3& A0, const Mat3& B0,
                                   const std::vector<double>& times) {
  namespace odeint = boost::numeric::odeint;
  if (times.empty()) return {};
  const Mat3 C1 = jacobi_C1(), C2 = jacobi_C2();
  auto rhs = [&](const detail::PairState& y, detail::PairState& dy, double t) {
    const Mat3 A = detail::to_mat(y.data()), B = detail::to_mat(y.data() + 9);
    const Mat3 R = profile(t);
    detail::from_mat(-A * C1 + B * R, dy.data());
    detail::from_mat(-A * C2 + B * C1.transpose(), dy.data() + 9);
  };
  detail::PairState y{};
  detail::from_mat(A0, y.data());
  detail::from_mat(B0, y.data() + 9);
  JacobiMatrices out;
  auto observer = [&](const detail::PairState& s, double t) {
    out.times.push_back(t);
    out.A.push_back(detail::to_mat(s.data()));
    out.B.push_back(detail::to_mat(s.data() + 9));
  };
  if (times.size() == 1) {
    observer(y, times.front());
    return out;
  }
  auto stepper = odeint::make_controlled(detail::kAbsTol, detail::kRelTol,
                                         odeint::runge_kutta_fehlberg78<detail::PairState>());
  odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3, observer);
  return out;
}

/// Standard initial data A_0 = I, B_0 = 0.
inline JacobiMatrices integrate_AB(const CurvatureProfile& profile, const std::vector<double>& times) {
  return integrate_AB(profile, Mat3::Identity(), Mat3::Zero(), times);
}

struct RiccatiTrajectory {
  std::vector<double> times;
  std::vector<Mat3> U;
  std::optional<double> blowup_time;  // set when |U| exceeded the blowup threshold
};

/// Integrates the U-Riccati equation from U_0 = 0. Stops at the first sample time where
/// the solution has left every bounded set (|U| > 1e8), reporting the crossing time.
inline RiccatiTrajectory integrate_riccati_U(const CurvatureProfile& profile,
                                             const std::vector<double>& times,
                                             double blowup_threshold = 1e8) {
  namespace odeint = boost::numeric::odeint;
  RiccatiTrajectory out;
  if (times.empty()) return out;
  const Mat3 C1 = jacobi_C1(), C2 = jacobi_C2();
  auto rhs = [&](const detail::Mat3State& y, detail::Mat3State& dy, double t) {
    const Mat3 U = detail::to_mat(y.data());
    const Mat3 R = profile(t);
    detail::from_mat(-U * R * U + C1 * U + U * C1.transpose() - C2, dy.data());
  };
  detail::Mat3State y{};
  out.times.push_back(times.front());
  out.U.push_back(Mat3::Zero());
  auto stepper = odeint::make_controlled(detail::kAbsTol, detail::kRelTol,
                                         odeint::runge_kutta_fehlberg78<detail::Mat3State>());
  double t = times.front();
  double dt = 1e-3;
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double target = times[n];
    while (t < target) {
      if (t + dt > target) dt = target - t;
      const double before = t;
      if (stepper.try_step(rhs, y, t, dt) == odeint::success) {
        if (detail::to_mat(y.data()).cwiseAbs().maxCoeff() > blowup_threshold) {
          out.blowup_time = t;
          return out;
        }
      } else if (dt < 1e-14 * std::max(1.0, before)) {
        out.blowup_time = before;
        return out;
      }
    }
    t = target;
    out.times.push_back(target);
    out.U.push_back(detail::to_mat(y.data()));
  }
  return out;
}

/// Closed forms for constant curvature k, with sigma = h0^2 + 2 H k and tau_t = t sqrt|sigma|.
namespace closed_form {

struct Kernels {
  double x = 0.0;  // signed tau_t^2
  kernel::Branch branch = kernel::Branch::Parabolic;
};

inline Kernels argument(double k, double h0, double H, double t) {
  double sigma = h0 * h0 + 2.0 * H * k;
  const auto branch = kernel::classify(sigma, std::max({h0 * h0, 2.0 * H * std::abs(k), 1.0}));
  if (branch == kernel::Branch::Parabolic) sigma = 0.0;
  return {sigma * t * t, branch};
}

inline constexpr double kPoleTolerance = 1e-12;

}  // namespace closed_form

inline Mat3 closed_form_U(double k, double h0, double H, double t) {
  const auto [x, branch] = closed_form::argument(k, h0, H, t);
  const double cq = kernel::cosq(x);
  if (std::abs(cq) <= closed_form::kPoleTolerance)
    throw Error(ErrorKind::Pole, "U blows up: cos(tau_t) = 0");
  Mat3 u = Mat3::Zero();
  u(0, 0) = -t * kernel::sinc(x) / cq;
  u(0, 1) = u(1, 0) = -t * t * kernel::c1(x) / cq;
  u(1, 1) = -t * t * t * kernel::e1(x) / cq;
  u(2, 2) = -t;
  return u;
}

inline Mat3 closed_form_S(double k, double h0, double H, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::Domain, "S is singular at t = 0");
  const auto [x, branch] = closed_form::argument(k, h0, H, t);
  const double d = kernel::d2(x);
  if (std::abs(d) <= closed_form::kPoleTolerance)
    throw Error(ErrorKind::ConjugatePoint, "S blows up at a conjugate time");
  Mat3 s = Mat3::Zero();
  s(0, 0) = -kernel::e1(x) / (t * d);
  s(0, 1) = s(1, 0) = kernel::c1(x) / (t * t * d);
  s(1, 1) = -kernel::sinc(x) / (t * t * t * d);
  s(2, 2) = -1.0 / t;
  return s;
}

/// |det B_t| = t (2 - 2 cos tau_t - tau_t sin tau_t) / sigma^2 = t^5 d2(sigma t^2).
inline double det_B_closed(double k, double h0, double H, double t) {
  const auto [x, branch] = closed_form::argument(k, h0, H, t);
  return std::pow(t, 5) * kernel::d2(x);
}

/// One (k, h0, H) case of the closed-form sweep: worst errors over the sampled times.
struct ClosedFormCase {
  double k = 0.0, h0 = 0.0, H = 0.0, t_max = 0.0;
  double u_error = 0.0;    // relative entry error of U against A^{-1}B and the Riccati flow
  double s_error = 0.0;    // relative entry error of S against B^{-1}A
  double det_error = 0.0;  // absolute error of |det B_t|
};

/// Closed forms against the linear system on k in [-4, 4], h0 in [-3 pi, 3 pi], H in {0.1 .. 4}.
/// Times run up to 95% of the first pole of U when sigma > 0, otherwise up to 1.
inline std::vector<ClosedFormCase> closed_form_sweep(int samples = 12) {
  if (samples < 2) throw Error(ErrorKind::InvalidConfig, "the sweep needs at least two time samples");
  std::vector<ClosedFormCase> out;
  for (int ik = -4; ik <= 4; ++ik)
    for (int ih = -4; ih <= 4; ++ih)
      for (double H : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        ClosedFormCase c;
        c.k = ik;
        c.h0 = 0.75 * kPi * ih;
        c.H = H;
        const double sigma = c.h0 * c.h0 + 2.0 * H * c.k;
        c.t_max = sigma > 0.0 ? std::min(1.0, 0.95 * (0.5 * kPi) / std::sqrt(sigma)) : 1.0;
        std::vector<double> times(static_cast<std::size_t>(samples));
        for (int i = 0; i < samples; ++i) times[static_cast<std::size_t>(i)] = c.t_max * i / (samples - 1);
        const auto profile = constant_profile(c.k, c.h0, H);
        const auto jm = integrate_AB(profile, times);
        const auto ric = integrate_riccati_U(profile, times);
        if (ric.blowup_time || ric.U.size() != times.size())
          throw Error(ErrorKind::Pole, "Riccati flow blew up inside the sweep window");
        for (std::size_t i = 1; i < times.size(); ++i) {
          const double t = times[i];
          const Mat3 Uc = closed_form_U(c.k, c.h0, H, t);
          c.u_error = std::max({c.u_error, relative_entry_error(Uc, jm.U(i)), relative_entry_error(Uc, ric.U[i])});
          c.s_error = std::max(c.s_error, relative_entry_error(closed_form_S(c.k, c.h0, H, t), jm.S(i)));
          c.det_error = std::max(c.det_error, std::abs(det_B_closed(c.k, c.h0, H, t) - std::abs(jm.B[i].determinant())));
        }
        out.push_back(c);
      }
  return out;
}

/// Smallest eigenvalue of the symmetric part of m.
inline double min_sym_eigenvalue(const Mat3& m) {
  const Mat3 s = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat3>(s, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Checks U^upper <= U^lower <= 0 in the quadratic-form order when R^lower <= R^upper, and
/// that det B^lower / det B^upper is nondecreasing and at least 1.
inline ComparisonReport riccati_compare(const CurvatureProfile& lower, const CurvatureProfile& upper,
                                        const std::vector<double>& times, double tol = 1e-9) {
  ComparisonReport rep;
  rep.name = "riccati_compare";
  rep.tolerance = tol;
  for (double t : times) {
    if (min_sym_eigenvalue(upper(t) - lower(t)) < -tol) {
      rep.hypotheses_hold = false;
      rep.notes.push_back("profiles are not ordered at t = " + std::to_string(t));
      break;
    }
  }
  const auto lo = integrate_AB(lower, times);
  const auto up = integrate_AB(upper, times);
  double prev_ratio = 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t <= 0.0) continue;
    const Mat3 Ul = lo.U(i), Uu = up.U(i);
    rep.add("U_lower - U_upper >= 0", t, min_sym_eigenvalue(Ul), min_sym_eigenvalue(Uu),
            min_sym_eigenvalue(Ul - Uu));
    rep.add("-U_lower >= 0", t, 0.0, 0.0, min_sym_eigenvalue(-Ul));
    const double ratio = lo.B[i].determinant() / up.B[i].determinant();
    rep.add("det ratio >= 1", t, ratio, 1.0, (ratio - 1.0) / std::max(1.0, ratio) + 0.0);
    rep.add("det ratio nondecreasing", t, ratio, prev_ratio,
            (ratio - prev_ratio) / std::max(1.0, std::abs(ratio)));
    prev_ratio = ratio;
  }
  return rep;
}

}  // namespace sascomp

#endif  // SASCOMP_RICCATI_HPP
