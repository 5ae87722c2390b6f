#ifndef SASCOMP_TYPES_HPP
#define SASCOMP_TYPES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sascomp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  SingularFrame,
  IntegratorFailure,
  ConjugatePoint,
  Pole,
  Domain,
  NonConvergence,
  Stability,
  InvalidConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularFrame: return "singular_frame";
    case ErrorKind::IntegratorFailure: return "integrator_failure";
    case ErrorKind::ConjugatePoint: return "conjugate_point";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::Stability: return "stability";
    case ErrorKind::InvalidConfig: return "invalid_config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Structure functions a_ij^k of a frame {v0,v1,v2}: [v_i,v_j] = sum_k a_ij^k v_k.
class StructureConstants {
 public:
  StructureConstants() { data_.fill(0.0); }

  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  /// Sets a_ij^k and a_ji^k = -a_ij^k together.
  void set(int i, int j, int k, double value) {
    data_[index(i, j, k)] = value;
    data_[index(j, i, k)] = -value;
  }

  void set_raw(int i, int j, int k, double value) { data_[index(i, j, k)] = value; }

  StructureConstants& operator+=(const StructureConstants& o) {
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  StructureConstants& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  friend StructureConstants operator-(StructureConstants a, const StructureConstants& b) {
    for (std::size_t n = 0; n < a.data_.size(); ++n) a.data_[n] -= b.data_[n];
    return a;
  }
  friend StructureConstants operator*(double s, StructureConstants a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// The contact normalisation plus a_01^1 = a_02^2 = 0 and a_01^2 + a_02^1 = 0.
  bool sasakian(double tol = 1e-12) const {
    const auto& a = *this;
    return std::abs(a(0, 1, 1)) <= tol && std::abs(a(0, 2, 2)) <= tol &&
           std::abs(a(0, 1, 2) + a(0, 2, 1)) <= tol;
  }

  /// Matrix of ad_{v_i} in the frame basis: column j holds the coordinates of [v_i, v_j].
  Mat3 ad(int i) const {
    Mat3 m;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m(k, j) = (*this)(i, j, k);
    return m;
  }

 private:
  static constexpr std::size_t index(int i, int j, int k) {
    return static_cast<std::size_t>(9 * i + 3 * j + k);
  }
  std::array<double, 27> data_{};
};

/// Max over entries of |a - b| / max(1, |b|).
inline double relative_entry_error(const Mat3& a, const Mat3& b) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(a(i, j) - b(i, j)) / std::max(1.0, std::abs(b(i, j))));
  return e;
}

/// Derivatives v_l a_ij^k, indexed by l.
using StructureDerivatives = std::array<StructureConstants, 3>;

/// One sampled comparison: the inequality holds when margin >= -tolerance.
struct ComparisonSample {
  std::string label;
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = true;
};

struct ComparisonReport {
  std::string name;
  double tolerance = 0.0;
  std::vector<ComparisonSample> samples;
  std::vector<std::string> notes;
  bool hypotheses_hold = true;

  void add(std::string label, double parameter, double lhs, double rhs, double margin) {
    samples.push_back({std::move(label), parameter, lhs, rhs, margin, margin >= -tolerance});
  }

  bool pass() const {
    if (!hypotheses_hold) return false;
    for (const auto& s : samples)
      if (!s.pass) return false;
    return true;
  }

  double min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) m = std::min(m, s.margin);
    return m;
  }
  double max_abs_margin() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s.margin));
    return m;
  }
};

}  // namespace sascomp

#endif  // SASCOMP_TYPES_HPP
