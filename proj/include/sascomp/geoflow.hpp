#ifndef SASCOMP_GEOFLOW_HPP
#define SASCOMP_GEOFLOW_HPP

#include "sascomp/frame.hpp"
#include "sascomp/spaces.hpp"
#include "sascomp/types.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <functional>
#include <vector>

namespace sascomp {

/// A covector in lift coordinates: base point and momenta h = (h0, h1, h2) along (v0, v1, v2).
template <class Point>
struct CovectorState {
  Point x;
  Vec3 h;
};

inline double hamiltonian(const Vec3& h) { return 0.5 * (h(1) * h(1) + h(2) * h(2)); }

/// dh_i/dt = sum_{j=1,2} h_j sum_k a_ji^k h_k. For Sasakian frames dh0/dt = 0.
inline Vec3 momentum_rhs(const StructureConstants& a, const Vec3& h) {
  Vec3 dh = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 1; j <= 2; ++j) {
      double inner = 0.0;
      for (int k = 0; k < 3; ++k) inner += a(j, i, k) * h(k);
      s += h(j) * inner;
    }
    dh(i) = s;
  }
  return dh;
}

template <class Space>
CovectorState<typename Space::Point> hamiltonian_rhs(const Space& space,
                                                     const CovectorState<typename Space::Point>& s) {
  return {space.horizontal_velocity(s.x, s.h(1), s.h(2)), momentum_rhs(space.structure(s.x), s.h)};
}

struct FlowOptions {
  double tolerance = 1e-10;
  double initial_step = 1e-2;
  double min_step = 1e-13;
  std::size_t max_steps = 200000;
};

template <class Point>
struct FlowTrace {
  std::vector<double> times;
  std::vector<CovectorState<Point>> states;
};

namespace detail {

template <class Space>
struct FlowSystem {
  static constexpr int kDim = Space::kPointDim + 3;
  using State = std::array<double, kDim>;
  const Space& space;

  void operator()(const State& y, State& dydt, double) const {
    const auto x = Space::unpack(y.data());
    const Vec3 h(y[Space::kPointDim], y[Space::kPointDim + 1], y[Space::kPointDim + 2]);
    const auto d = hamiltonian_rhs(space, CovectorState<typename Space::Point>{x, h});
    Space::pack(d.x, dydt.data());
    for (int i = 0; i < 3; ++i) dydt[static_cast<std::size_t>(Space::kPointDim + i)] = d.h(i);
  }

  static State pack(const CovectorState<typename Space::Point>& s) {
    State y{};
    Space::pack(s.x, y.data());
    for (int i = 0; i < 3; ++i) y[static_cast<std::size_t>(Space::kPointDim + i)] = s.h(i);
    return y;
  }
  static CovectorState<typename Space::Point> unpack(const State& y) {
    return {Space::unpack(y.data()),
            Vec3(y[Space::kPointDim], y[Space::kPointDim + 1], y[Space::kPointDim + 2])};
  }
  void project(State& y) const {
    auto x = Space::unpack(y.data());
    space.project(x);
    Space::pack(x, y.data());
  }
};

}  // namespace detail

/// Integrates the geodesic flow for time t with adaptive Runge-Kutta-Fehlberg 7(8).
/// The accepted step times are returned through `steps` so that nearby initial
/// conditions can be integrated on the identical grid (smooth finite differences).
template <class Space>
CovectorState<typename Space::Point> flow(const Space& space,
                                          const CovectorState<typename Space::Point>& start,
                                          double t, const FlowOptions& options = {},
                                          std::vector<double>* steps = nullptr,
                                          FlowTrace<typename Space::Point>* trace = nullptr) {
  namespace odeint = boost::numeric::odeint;
  using System = detail::FlowSystem<Space>;
  using State = typename System::State;
  if (!(t >= 0.0)) throw Error(ErrorKind::Domain, "flow time must be nonnegative");
  System system{space};
  State y = System::pack(start);
  if (steps) steps->assign(1, 0.0);
  if (trace) {
    trace->times.assign(1, 0.0);
    trace->states.assign(1, start);
  }
  if (t == 0.0) return start;

  auto stepper = odeint::make_controlled(options.tolerance, options.tolerance,
                                         odeint::runge_kutta_fehlberg78<State>());
  double time = 0.0;
  double dt = std::min(options.initial_step, t);
  std::size_t count = 0;
  while (time < t) {
    if (++count > options.max_steps)
      throw Error(ErrorKind::IntegratorFailure, "step budget exhausted");
    const bool last = time + dt >= t;
    if (last) dt = t - time;
    const double before = time;
    const auto result = stepper.try_step(system, y, time, dt);
    if (result == odeint::success) {
      if (last) time = t;
      system.project(y);
      if (steps) steps->push_back(time);
      if (trace) {
        trace->times.push_back(time);
        trace->states.push_back(System::unpack(y));
      }
    } else {
      time = before;
      if (dt < options.min_step)
        throw Error(ErrorKind::IntegratorFailure, "step size underflow (chart breakdown?)");
    }
  }
  return System::unpack(y);
}

/// Integrates on a prescribed grid of times with the fixed-step 7(8) scheme.
template <class Space>
CovectorState<typename Space::Point> flow_on_grid(const Space& space,
                                                  const CovectorState<typename Space::Point>& start,
                                                  const std::vector<double>& grid) {
  namespace odeint = boost::numeric::odeint;
  using System = detail::FlowSystem<Space>;
  using State = typename System::State;
  System system{space};
  State y = System::pack(start);
  odeint::runge_kutta_fehlberg78<State> stepper;
  for (std::size_t n = 1; n < grid.size(); ++n) {
    stepper.do_step(system, y, grid[n - 1], grid[n] - grid[n - 1]);
    system.project(y);
  }
  return System::unpack(y);
}

/// pi(e^{tH}(alpha)) for alpha with frame momenta (h0, h1, h2) at x0.
template <class Space>
typename Space::Point exp_map(const Space& space, const typename Space::Point& x0,
                              const Vec3& alpha, double t, const FlowOptions& options = {}) {
  return flow(space, CovectorState<typename Space::Point>{x0, alpha}, t, options).x;
}

struct JacobianDensity {
  double value = 0.0;
  Mat3 jacobian = Mat3::Zero();  // columns: frame coordinates of d exp / d alpha_j
  bool near_conjugate = false;
};

struct DensityOptions {
  FlowOptions flow{1e-11};
  double relative_step = 1e-5;
  double conjugate_threshold = 1e-10;
};

/// |det d(exp_1)| at alpha measured against the frame volume eta and the Lebesgue
/// measure of the frame momenta; central differences with one Richardson step.
template <class Space>
JacobianDensity jacobian_density(const Space& space, const typename Space::Point& x0,
                                 const Vec3& alpha, const DensityOptions& options = {}) {
  using Point = typename Space::Point;
  std::vector<double> grid;
  const auto end = flow(space, CovectorState<Point>{x0, alpha}, 1.0, options.flow, &grid);
  const double delta = options.relative_step * std::max(1.0, alpha.norm());
  auto column = [&](int j, double d) -> Vec3 {
    Vec3 plus = alpha, minus = alpha;
    plus(j) += d;
    minus(j) -= d;
    const Point xp = flow_on_grid(space, CovectorState<Point>{x0, plus}, grid).x;
    const Point xm = flow_on_grid(space, CovectorState<Point>{x0, minus}, grid).x;
    return space.frame_coordinates(end.x, Point(xp - xm)) / (2.0 * d);
  };
  JacobianDensity out;
  for (int j = 0; j < 3; ++j)
    out.jacobian.col(j) = (4.0 * column(j, 0.5 * delta) - column(j, delta)) / 3.0;
  out.value = std::abs(out.jacobian.determinant());
  out.near_conjugate = out.value < options.conjugate_threshold;
  return out;
}

}  // namespace sascomp

#endif  // SASCOMP_GEOFLOW_HPP
