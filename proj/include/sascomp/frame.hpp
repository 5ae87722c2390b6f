#ifndef SASCOMP_FRAME_HPP
#define SASCOMP_FRAME_HPP

#include "sascomp/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <functional>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

namespace sascomp {

namespace detail {

/// Fourth-order central difference of a vector-valued function along a line.
template <class F>
auto central4(const F& f, double h) {
  using R = std::decay_t<decltype(f(h))>;
  const R a = f(2.0 * h), b = f(h), c = f(-h), d = f(-2.0 * h);
  return R((-a + 8.0 * b - 8.0 * c + d) / (12.0 * h));
}

inline double fd_step(const Vec3& x) { return 1e-4 * (1.0 + x.norm()); }

}  // namespace detail

/// A contact frame {v0, v1, v2} on a three-dimensional chart, v0 the Reeb field.
///
/// Vector fields are given as a function returning the 3x3 matrix whose columns
/// are v0, v1, v2 in chart coordinates. Structure functions and their frame
/// derivatives may be supplied analytically; otherwise they are recovered by
/// finite-difference brackets.
class ContactFrame {
 public:
  using FieldFn = std::function<Mat3(const Vec3&)>;
  using StructureFn = std::function<StructureConstants(const Vec3&)>;
  using DerivativeFn = std::function<StructureDerivatives(const Vec3&)>;

  explicit ContactFrame(FieldFn fields, StructureFn structure = {}, DerivativeFn derivatives = {})
      : fields_(std::move(fields)),
        structure_(std::move(structure)),
        derivatives_(std::move(derivatives)) {}

  static constexpr double kMinDeterminant = 1e-12;

  Mat3 fields(const Vec3& x) const {
    Mat3 v = fields_(x);
    if (!(std::abs(v.determinant()) > kMinDeterminant))
      throw Error(ErrorKind::SingularFrame, "frame determinant vanishes at queried point");
    return v;
  }

  Vec3 field(const Vec3& x, int i) const { return fields_(x).col(i); }

  bool has_analytic_structure() const { return static_cast<bool>(structure_); }
  bool has_analytic_derivatives() const { return static_cast<bool>(derivatives_); }

  StructureConstants structure(const Vec3& x) const {
    return structure_ ? structure_(x) : structure_fd(x);
  }

  /// Structure functions from finite-difference Lie brackets of the vector fields.
  StructureConstants structure_fd(const Vec3& x) const {
    const Mat3 v = fields(x);
    const double h = detail::fd_step(x);
    // derivative of v_j along v_i at x
    auto along = [&](int j, int i) -> Vec3 {
      const Vec3 dir = v.col(i);
      return detail::central4([&](double s) -> Vec3 { return fields_(x + s * dir).col(j); }, h);
    };
    const auto lu = v.partialPivLu();
    StructureConstants a;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const Vec3 bracket = along(j, i) - along(i, j);
        const Vec3 coords = lu.solve(bracket);
        for (int k = 0; k < 3; ++k) a.set(i, j, k, coords(k));
      }
    }
    return a;
  }

  /// v_l a_ij^k for l = 0, 1, 2.
  StructureDerivatives structure_derivatives(const Vec3& x) const {
    if (derivatives_) return derivatives_(x);
    const Mat3 v = fields(x);
    const double h = detail::fd_step(x);
    StructureDerivatives d;
    for (int l = 0; l < 3; ++l) {
      const Vec3 dir = v.col(l);
      auto a_at = [&](double s) { return structure(x + s * dir); };
      StructureConstants acc = -1.0 * a_at(2.0 * h);
      acc += 8.0 * a_at(h);
      acc += -8.0 * a_at(-h);
      acc += a_at(-2.0 * h);
      acc *= 1.0 / (12.0 * h);
      d[static_cast<std::size_t>(l)] = acc;
    }
    return d;
  }

 private:
  FieldFn fields_;
  StructureFn structure_;
  DerivativeFn derivatives_;
};

struct ValidationEntry {
  std::string identity;
  double residual = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.residual);
    return m;
  }
};

/// Checks antisymmetry and the contact normalisation of a frame's structure functions.
inline ValidationReport validate_structure(const StructureConstants& a, double tol = 1e-12) {
  ValidationReport report;
  auto add = [&](std::string name, double residual) {
    report.entries.push_back({std::move(name), std::abs(residual), std::abs(residual) <= tol});
  };
  double antisym = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) antisym = std::max(antisym, std::abs(a(i, j, k) + a(j, i, k)));
  add("a_ij^k + a_ji^k = 0", antisym);
  add("a_01^0 = 0", a(0, 1, 0));
  add("a_02^0 = 0", a(0, 2, 0));
  add("a_12^0 = -1", a(1, 2, 0) + 1.0);
  add("a_01^1 + a_02^2 = 0", a(0, 1, 1) + a(0, 2, 2));
  return report;
}

/// Tanaka-Webster curvature from the structure functions and their frame derivatives.
inline double tanaka_webster_kappa(const StructureConstants& a, const StructureDerivatives& d) {
  return d[1](1, 2, 2) - d[2](1, 2, 1) - a(1, 2, 1) * a(1, 2, 1) - a(1, 2, 2) * a(1, 2, 2) -
         0.5 * (a(0, 1, 2) - a(0, 2, 1));
}

inline double tanaka_webster_kappa(const ContactFrame& frame, const Vec3& x) {
  return tanaka_webster_kappa(frame.structure(x), frame.structure_derivatives(x));
}

/// Curvature of the Riemannian extension g^R making {v0, v1, v2} orthonormal.
struct RiemannianCurvature {
  double sectional_12 = 0.0;  // K(v1, v2)
  double ricci_0 = 0.0;       // Rc(v0)
  /// 2 K(v1,v2) + Rc(v0) + 1, the combination compared with the Tanaka-Webster invariant.
  double combination() const { return 2.0 * sectional_12 + ricci_0 + 1.0; }
};

/// Levi-Civita connection by Koszul's formula, curvature tensor by its definition.
inline RiemannianCurvature riemannian_curvature(const StructureConstants& a,
                                                const StructureDerivatives& d) {
  // gamma[i][j][k] = g(nabla_{v_i} v_j, v_k)
  double gamma[3][3][3];
  double dgamma[3][3][3][3];  // v_l gamma_ij^k
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        gamma[i][j][k] = 0.5 * (a(i, j, k) - a(j, k, i) + a(k, i, j));
        for (int l = 0; l < 3; ++l) {
          const auto& dl = d[static_cast<std::size_t>(l)];
          dgamma[l][i][j][k] = 0.5 * (dl(i, j, k) - dl(j, k, i) + dl(k, i, j));
        }
      }
  // g(R(v_p, v_q) v_c, v_e), R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
  auto riemann = [&](int p, int q, int c, int e) {
    auto nested = [&](int x, int y) {
      double s = dgamma[x][y][c][e];
      for (int k = 0; k < 3; ++k) s += gamma[y][c][k] * gamma[x][k][e];
      return s;
    };
    double bracket_term = 0.0;
    for (int n = 0; n < 3; ++n) bracket_term += a(p, q, n) * gamma[n][c][e];
    return nested(p, q) - nested(q, p) - bracket_term;
  };
  RiemannianCurvature out;
  out.sectional_12 = riemann(1, 2, 2, 1);
  out.ricci_0 = riemann(1, 0, 0, 1) + riemann(2, 0, 0, 2);
  return out;
}

inline RiemannianCurvature riemannian_curvature(const ContactFrame& frame, const Vec3& x) {
  return riemannian_curvature(frame.structure(x), frame.structure_derivatives(x));
}

/// Tanaka-Webster curvature recovered from Riemannian curvature: (2K(v1,v2) + Rc(v0) + 1) / 2.
inline double riemannian_kappa_oracle(const ContactFrame& frame, const Vec3& x) {
  return 0.5 * riemannian_curvature(frame, x).combination();
}

/// a = dh0(H) at the covector with frame momenta h = (h0, h1, h2).
inline double reeb_invariant_a(const StructureConstants& a, const Vec3& h) {
  const double h1 = h(1), h2 = h(2);
  return -h1 * (a(0, 1, 1) * h1 + a(0, 1, 2) * h2) - h2 * (a(0, 2, 1) * h1 + a(0, 2, 2) * h2);
}

inline double reeb_invariant_a(const ContactFrame& frame, const Vec3& x, const Vec3& h) {
  return reeb_invariant_a(frame.structure(x), h);
}

/// Frame of left-invariant fields of a 3D Lie algebra in canonical coordinates of the
/// second kind, g(x) = exp(x0 E0) exp(x1 E1) exp(x2 E2).
inline ContactFrame left_invariant_chart_frame(const StructureConstants& algebra) {
  const Mat3 ad1 = algebra.ad(1);
  const Mat3 ad2 = algebra.ad(2);
  auto fields = [ad1, ad2](const Vec3& x) -> Mat3 {
    const Mat3 back2 = Mat3((-x(2) * ad2).exp());
    const Mat3 back1 = Mat3((-x(1) * ad1).exp());
    Mat3 maurer_cartan;
    maurer_cartan.col(0) = back2 * back1 * Vec3::UnitX();
    maurer_cartan.col(1) = back2 * Vec3::UnitY();
    maurer_cartan.col(2) = Vec3::UnitZ();
    return maurer_cartan.inverse();
  };
  auto structure = [algebra](const Vec3&) { return algebra; };
  auto derivatives = [](const Vec3&) { return StructureDerivatives{}; };
  return ContactFrame(fields, structure, derivatives);
}

/// Rotates the horizontal pair (v1, v2) by an angle field psi(x). The Reeb field and the
/// subriemannian metric are unchanged, so every curvature invariant is unchanged too.
inline ContactFrame rotate_horizontal(const ContactFrame& base, std::function<double(const Vec3&)> psi) {
  auto fields = [base, psi = std::move(psi)](const Vec3& x) {
    const Mat3 v = base.fields(x);
    const double c = std::cos(psi(x)), s = std::sin(psi(x));
    Mat3 out = v;
    out.col(1) = c * v.col(1) + s * v.col(2);
    out.col(2) = -s * v.col(1) + c * v.col(2);
    return out;
  };
  return ContactFrame(fields);
}

}  // namespace sascomp

#endif  // SASCOMP_FRAME_HPP
