#ifndef SASCOMP_VOLUME_HPP
#define SASCOMP_VOLUME_HPP

#include "sascomp/geoflow.hpp"
#include "sascomp/kernels.hpp"
#include "sascomp/models.hpp"
#include "sascomp/types.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace sascomp {

/// Volume density b^k(r, h) = r^2 (2 - 2cos tau - tau sin tau) / sigma^2, sigma = h^2 + r^2 k.
inline double bk_density(double k, double r, double h) {
  double sigma = h * h + r * r * k;
  if (kernel::classify(sigma, std::max(h * h, r * r * std::abs(k))) == kernel::Branch::Parabolic)
    sigma = 0.0;
  return r * r * kernel::d2(sigma);
}

enum class VolumeMethod { ClosedForm, ExpOracle };

inline const char* to_string(VolumeMethod m) {
  return m == VolumeMethod::ClosedForm ? "closed_form" : "exp_oracle";
}

struct BallVolumeResult {
  ModelSpace model;
  double R = 0.0;
  double k = 0.0;
  double volume = 0.0;
  double error = 0.0;
  VolumeMethod method = VolumeMethod::ClosedForm;
  std::size_t excluded_points = 0;  // oracle nodes dropped as near-conjugate
};

/// The space form of curvature k with the matching metric scale.
inline ModelSpace space_form(double k) {
  if (k > 0.0) return {ModelKind::SU2, std::sqrt(k)};
  if (k < 0.0) return {ModelKind::SL2, std::sqrt(-k)};
  return {ModelKind::Heisenberg, 1.0};
}

namespace detail {

/// Radii where the h-range of the domain changes analytic form.
inline std::vector<double> radial_breaks(const InjectivityDomain& dom) {
  std::vector<double> br{0.0};
  if (dom.kind != ModelKind::Heisenberg) {
    const double special = kTwoPi / dom.c;
    if (special < dom.R) br.push_back(special);
  }
  br.push_back(dom.R);
  return br;
}

/// r-extent of the domain (SU(2) is empty beyond r = 2 pi / c).
inline double radial_extent(const InjectivityDomain& dom) {
  if (dom.kind == ModelKind::SU2) return std::min(dom.R, kTwoPi / dom.c);
  return dom.R;
}

}  // namespace detail

/// Integral of b^k over the injectivity domain `dom` (measure r dr dtheta dh),
/// by nested adaptive Gauss-Kronrod quadrature.
inline BallVolumeResult integrate_density(const InjectivityDomain& dom, double k, double rel_tol = 1e-10) {
  using boost::math::quadrature::gauss_kronrod;
  BallVolumeResult out;
  out.R = dom.R;
  out.k = k;
  const double r_max = detail::radial_extent(dom);
  double total = 0.0, err_total = 0.0;
  auto inner = [&](double r) {
    const auto [lo, hi] = dom.h_range(r);
    if (!(hi > lo)) return 0.0;
    double e = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate([&](double h) { return bk_density(k, r, h); }, lo,
                                                          hi, 15, rel_tol * 1e-2, &e);
    return 2.0 * v;  // h and -h
  };
  auto breaks = detail::radial_breaks(dom);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = std::min(breaks[i + 1], r_max);
    if (!(b > a)) continue;
    double e = 0.0;
    total += gauss_kronrod<double, 31>::integrate([&](double r) { return r * inner(r); }, a, b, 15, rel_tol,
                                                  &e);
    err_total += e;
  }
  out.volume = kTwoPi * total;
  out.error = kTwoPi * err_total;
  return out;
}

/// eta(B(x, R)) on a space form from the closed-form density.
inline BallVolumeResult ball_volume(const ModelSpace& m, double R) {
  if (R == 0.0) {
    BallVolumeResult z;
    z.model = m;
    z.k = m.k();
    return z;
  }
  const auto dom = injectivity_domain(m, R);
  auto res = integrate_density(dom, m.k());
  res.model = m;
  return res;
}

namespace detail {

struct GaussRule {
  std::vector<double> nodes, weights;  // on [-1, 1]
};

inline GaussRule gauss_legendre(int n) {
  GaussRule g;
  for (double z : boost::math::legendre_p_zeros<double>(n)) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    g.nodes.push_back(z);
    g.weights.push_back(w);
    if (z != 0.0) {
      g.nodes.push_back(-z);
      g.weights.push_back(w);
    }
  }
  return g;
}

inline constexpr double kConjugateRelative = 1e-10;

template <class Space>
double oracle_quadrature(const Space& space, const InjectivityDomain& dom, int n, std::size_t& excluded,
                         double& excluded_mass) {
  const auto rule = gauss_legendre(n);
  const double r_max = radial_extent(dom);
  auto breaks = radial_breaks(dom);
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
    const double a = breaks[seg], b = std::min(breaks[seg + 1], r_max);
    if (!(b > a)) continue;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
      const double wr = 0.5 * (b - a) * rule.weights[i];
      const auto [lo, hi] = dom.h_range(r);
      if (!(hi > lo)) continue;
      double inner = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double h = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[j];
        const double wh = 0.5 * (hi - lo) * rule.weights[j];
        const auto d = jacobian_density(space, space.origin(), Vec3(h, r, 0.0));
        // b vanishes like r^2 at the axis; only a small value relative to r^2 signals a conjugate node
        if (d.near_conjugate && d.value < kConjugateRelative * r * r) {
          ++excluded;
          excluded_mass += kTwoPi * wr * r * 2.0 * wh * kConjugateRelative * r * r;
          continue;
        }
        inner += wh * d.value;
      }
      total += wr * r * 2.0 * inner;
    }
  }
  return kTwoPi * total;
}

}  // namespace detail

/// eta(B(x, R)) from the numerically differentiated exponential map. The error estimate
/// combines the change against a half-resolution rule with the density's FD accuracy.
inline BallVolumeResult ball_volume_exp_oracle(const ModelSpace& m, double R, int grid = 64) {
  BallVolumeResult out;
  out.model = m;
  out.R = R;
  out.k = m.k();
  out.method = VolumeMethod::ExpOracle;
  if (R == 0.0) return out;
  if (grid < 8) throw Error(ErrorKind::InvalidConfig, "oracle grid must have at least 8 nodes per axis");
  const auto dom = injectivity_domain(m, R);
  with_space(m, [&](const auto& space) {
    std::size_t excluded = 0, coarse_excluded = 0;
    double mass = 0.0, coarse_mass = 0.0;
    out.volume = detail::oracle_quadrature(space, dom, grid, excluded, mass);
    const double coarse = detail::oracle_quadrature(space, dom, grid / 2, coarse_excluded, coarse_mass);
    out.excluded_points = excluded;
    out.error = std::abs(out.volume - coarse) + 1e-6 * std::abs(out.volume) + mass;
    return 0;
  });
  return out;
}

/// Bishop comparison: eta(B(x,R)) <= integral of b^{k_lower} over the same injectivity domain,
/// for a model whose curvature is at least k_lower. Also checks the domain inclusion used in
/// the argument, Omega_R inside {|h^2 + k_lower r^2| <= 4 pi^2}.
inline ComparisonReport bishop_check(double k_lower, const ModelSpace& m, double R, double tol = 2e-6) {
  ComparisonReport rep;
  rep.name = "bishop";
  rep.tolerance = tol;
  if (m.k() < k_lower) {
    rep.hypotheses_hold = false;
    rep.notes.push_back("model curvature is below k_lower");
  }
  if (k_lower < 0.0 && R > sl2_validity_radius(std::sqrt(-k_lower)) * (1.0 + 1e-12)) {
    rep.hypotheses_hold = false;
    rep.notes.push_back("R exceeds 2 sqrt(2) pi / c for the negative comparison curvature");
  }
  const auto dom = injectivity_domain(m, R);
  const auto lhs = ball_volume(m, R);
  const auto rhs = integrate_density(dom, k_lower);
  rep.add("vol(B_R) <= int b^k_lower", R, lhs.volume, rhs.volume,
          (rhs.volume - lhs.volume) / std::max(rhs.volume, 1e-300));

  // domain inclusion on a boundary and interior sample
  double worst = -std::numeric_limits<double>::infinity();
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    const double r = detail::radial_extent(dom) * i / n;
    const auto [lo, hi] = dom.h_range(r);
    if (!(hi >= lo)) continue;
    for (double h : {lo, hi}) worst = std::max(worst, std::abs(h * h + k_lower * r * r) - 4.0 * kPi * kPi);
  }
  rep.add("Omega_R inside {|sigma_k_lower| <= 4 pi^2}", R, worst + 4.0 * kPi * kPi, 4.0 * kPi * kPi,
          -worst / (4.0 * kPi * kPi));
  return rep;
}

}  // namespace sascomp

#endif  // SASCOMP_VOLUME_HPP
