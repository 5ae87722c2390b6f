#ifndef SASCOMP_SPACES_HPP
#define SASCOMP_SPACES_HPP

// Point representations the geodesic flow runs on.
//
// ChartSpace: a contact frame on a chart of R^3.
// MatrixGroupSpace: a left-invariant frame on a 2x2 matrix group (SU(2), SL(2)),
// points stored as complex 2x2 matrices, flows along frame fields computed exactly
// by right multiplication with matrix exponentials.

#include "sascomp/frame.hpp"
#include "sascomp/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <utility>

namespace sascomp {

using Mat2c = Eigen::Matrix2cd;
using cplx = std::complex<double>;

class ChartSpace {
 public:
  using Point = Vec3;
  static constexpr int kPointDim = 3;

  explicit ChartSpace(ContactFrame frame, Point origin = Point::Zero())
      : frame_(std::move(frame)), origin_(std::move(origin)) {}

  const ContactFrame& frame() const { return frame_; }
  const Point& origin() const { return origin_; }

  StructureConstants structure(const Point& x) const { return frame_.structure(x); }

  Point horizontal_velocity(const Point& x, double h1, double h2) const {
    const Mat3 v = frame_.fields(x);
    return h1 * v.col(1) + h2 * v.col(2);
  }

  void project(Point&) const {}

  /// Displacement along v_i, accurate to first order (central differences cancel the rest).
  Point move(const Point& x, int i, double eps) const { return x + eps * frame_.field(x, i); }

  /// Frame coordinates of a tangent vector (expressed as a chart displacement) at x.
  Vec3 frame_coordinates(const Point& x, const Point& delta) const {
    return frame_.fields(x).partialPivLu().solve(delta);
  }

  /// Residual used by shooting: a - b in chart coordinates.
  Eigen::VectorXd difference(const Point& a, const Point& b) const { return a - b; }

  double scale(const Point& x) const { return x.norm(); }

  static void pack(const Point& x, double* out) {
    for (int i = 0; i < 3; ++i) out[i] = x(i);
  }
  static Point unpack(const double* in) { return Point(in[0], in[1], in[2]); }

 private:
  ContactFrame frame_;
  Point origin_;
};

/// exp of a traceless 2x2 complex matrix: cosh(s) I + sinh(s)/s M with s^2 = -det M.
inline Mat2c expm_traceless(const Mat2c& m) {
  const cplx s2 = -m.determinant();
  cplx ch, shc;
  if (std::abs(s2) < 1e-6) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
    shc = 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
  } else {
    const cplx s = std::sqrt(s2);
    ch = std::cosh(s);
    shc = std::sinh(s) / s;
  }
  return ch * Mat2c::Identity() + shc * m;
}

class MatrixGroupSpace {
 public:
  using Point = Mat2c;
  static constexpr int kPointDim = 8;

  /// basis holds the matrices of v0, v1, v2.
  explicit MatrixGroupSpace(std::array<Mat2c, 3> basis) : basis_(std::move(basis)) {
    Eigen::Matrix<double, 8, 3> m;
    for (int i = 0; i < 3; ++i) m.col(i) = flatten(basis_[static_cast<std::size_t>(i)]);
    pinv_ = (m.transpose() * m).inverse() * m.transpose();
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const Mat2c b = basis_[static_cast<std::size_t>(i)] * basis_[static_cast<std::size_t>(j)] -
                        basis_[static_cast<std::size_t>(j)] * basis_[static_cast<std::size_t>(i)];
        const Vec3 c = algebra_coordinates(b);
        for (int k = 0; k < 3; ++k) algebra_.set(i, j, k, c(k));
      }
  }

  const std::array<Mat2c, 3>& basis() const { return basis_; }
  const StructureConstants& algebra() const { return algebra_; }
  Point origin() const { return Point::Identity(); }

  StructureConstants structure(const Point&) const { return algebra_; }

  Mat2c element(const Vec3& coords) const {
    return coords(0) * basis_[0] + coords(1) * basis_[1] + coords(2) * basis_[2];
  }

  /// Least-squares coordinates of a matrix in the basis (exact for algebra elements).
  Vec3 algebra_coordinates(const Mat2c& m) const { return pinv_ * flatten(m); }

  Point horizontal_velocity(const Point& g, double h1, double h2) const {
    return g * (h1 * basis_[1] + h2 * basis_[2]);
  }

  void project(Point& g) const { g /= std::sqrt(g.determinant()); }

  Point move(const Point& g, int i, double eps) const {
    return g * expm_traceless(eps * basis_[static_cast<std::size_t>(i)]);
  }

  Vec3 frame_coordinates(const Point& g, const Point& delta) const {
    return algebra_coordinates(g.inverse() * delta);
  }

  Eigen::VectorXd difference(const Point& a, const Point& b) const {
    return flatten(b.inverse() * a - Mat2c::Identity());
  }

  double scale(const Point& g) const { return (g - Mat2c::Identity()).norm(); }

  static void pack(const Point& g, double* out) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        out[2 * (2 * i + j)] = g(i, j).real();
        out[2 * (2 * i + j) + 1] = g(i, j).imag();
      }
  }
  static Point unpack(const double* in) {
    Point g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = cplx(in[2 * (2 * i + j)], in[2 * (2 * i + j) + 1]);
    return g;
  }

  static Eigen::Matrix<double, 8, 1> flatten(const Mat2c& m) {
    Eigen::Matrix<double, 8, 1> v;
    pack(m, v.data());
    return v;
  }

 private:
  std::array<Mat2c, 3> basis_;
  Eigen::Matrix<double, 3, 8> pinv_;
  StructureConstants algebra_;
};

}  // namespace sascomp

#endif  // SASCOMP_SPACES_HPP
