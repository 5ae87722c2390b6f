#include "sascomp/geoflow.hpp"
#include "sascomp/models.hpp"
#include "sascomp/volume.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sascomp;

TEST(Geoflow, HeisenbergStraightLine) {
  const auto space = heisenberg_space();
  const Vec3 end = exp_map(space, Vec3::Zero(), Vec3(0.0, 1.0, 0.0), 1.0);
  EXPECT_NEAR((end - Vec3(1.0, 0.0, 0.0)).norm(), 0.0, 1e-12);
  const auto d = hamiltonian_rhs(space, CovectorState<Vec3>{Vec3::Zero(), Vec3(0.0, 1.0, 0.0)});
  EXPECT_NEAR(d.h.norm(), 0.0, 1e-15);
}

TEST(Geoflow, HeisenbergMomentumSignMatchesCanonicalFlow) {
  // Canonical Hamilton equations in (x, p) with H = (<p,v1>^2 + <p,v2>^2)/2.
  const auto frame = heisenberg_frame();
  const Vec3 x0 = Vec3::Zero();
  const Vec3 h(1.0, 1.0, 0.0);
  const Mat3 v = frame.fields(x0);
  const Vec3 p = v.transpose().inverse() * h;  // <p, v_i> = h_i
  auto H = [&](const Vec3& x, const Vec3& q) {
    const Mat3 w = frame.fields(x);
    const double a = q.dot(w.col(1)), b = q.dot(w.col(2));
    return 0.5 * (a * a + b * b);
  };
  const double e = 1e-6;
  Vec3 pdot;
  for (int i = 0; i < 3; ++i) {
    Vec3 d = Vec3::Zero();
    d(i) = e;
    pdot(i) = -(H(x0 + d, p) - H(x0 - d, p)) / (2 * e);
  }
  // h_i = <p, v_i(x)>, so dh_i = <pdot, v_i> + <p, Dv_i xdot>
  const Vec3 xdot = h(1) * v.col(1) + h(2) * v.col(2);
  Vec3 hdot;
  for (int i = 0; i < 3; ++i) {
    const Vec3 dv = (frame.field(x0 + e * xdot, i) - frame.field(x0 - e * xdot, i)) / (2 * e);
    hdot(i) = pdot.dot(v.col(i)) + p.dot(dv);
  }
  const Vec3 ours = momentum_rhs(frame.structure(x0), h);
  EXPECT_NEAR((ours - hdot).norm(), 0.0, 1e-8);
  EXPECT_NEAR(ours(2), -1.0, 1e-12);
}

TEST(Geoflow, HeisenbergFullCircleReturnsToAxis) {
  const auto space = heisenberg_space();
  const Vec3 end = exp_map(space, Vec3::Zero(), Vec3(kTwoPi, 1.0, 0.0), 1.0);
  EXPECT_LE(std::hypot(end(0), end(1)), 1e-8);
  // enclosed disc of radius 1/(2 pi): |z| = area = 1/(4 pi)
  EXPECT_NEAR(std::abs(end(2)), 1.0 / (4.0 * kPi), 1e-9);
}

TEST(Geoflow, ConservationOnRandomSasakianStates) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
    const ModelSpace m{kind, 1.0};
    with_space(m, [&](const auto& space) {
      using Point = typename std::decay_t<decltype(space)>::Point;
      for (int n = 0; n < 334; ++n) {  // 1002 initial conditions over the three models
        const Vec3 h(u(rng), u(rng), u(rng));
        FlowTrace<Point> trace;
        flow(space, CovectorState<Point>{space.origin(), h}, 1.0, {}, nullptr, &trace);
        for (const auto& s : trace.states) {
          EXPECT_NEAR(hamiltonian(s.h), hamiltonian(h), 1e-9);
          EXPECT_NEAR(s.h(0), h(0), 1e-9);
        }
      }
      return 0;
    });
  }
}

TEST(Geoflow, TimeRescaling) {
  const auto space = su2_space(1.0);
  const Vec3 a(0.7, 0.4, -0.9);
  const Mat2c g1 = exp_map(space, space.origin(), 2.0 * a, 0.5);
  const Mat2c g2 = exp_map(space, space.origin(), a, 1.0);
  EXPECT_LT((g1 - g2).norm(), 1e-9);
}

TEST(Geoflow, SU2MatchesMatrixExponential) {
  const double c = 1.5;
  const auto space = su2_space(c);
  const double t = 0.1;
  const Mat2c g = exp_map(space, space.origin(), Vec3(0.0, 1.0 / c, 0.0), t);
  const Mat2c u1 = su2_generators().first;
  EXPECT_LT((g - expm_traceless(t * u1)).norm(), 1e-8);
}

TEST(Geoflow, JacobianDensityHeisenberg) {
  const auto space = heisenberg_space();
  EXPECT_NEAR(jacobian_density(space, Vec3::Zero(), Vec3(kPi, 1.0, 0.0)).value, 4.0 / std::pow(kPi, 4), 1e-6);
  EXPECT_NEAR(jacobian_density(space, Vec3::Zero(), Vec3(0.0, 1.0, 0.0)).value, 1.0 / 12.0, 1e-7);
  EXPECT_TRUE(jacobian_density(space, Vec3::Zero(), Vec3(kTwoPi, 1.0, 0.0)).value < 1e-6);
}

TEST(Geoflow, JacobianDensityMatchesClosedFormOnSpaceForms) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
    const ModelSpace m{kind, 1.0};
    const auto dom = injectivity_domain(m, 2.0);
    with_space(m, [&](const auto& space) {
      for (int n = 0; n < 50; ++n) {
        const double r = 0.2 + 1.8 * U(rng);
        const auto [lo, hi] = dom.h_range(r);
        const double h = lo + (hi - lo) * (0.05 + 0.85 * U(rng));  // away from the conjugate boundary
        const double th = kTwoPi * U(rng);
        const double oracle = jacobian_density(space, space.origin(), Vec3(h, r * std::cos(th), r * std::sin(th))).value;
        const double closed = bk_density(m.k(), r, h);
        EXPECT_LE(std::abs(oracle - closed), 1e-3 * closed) << m.name() << " r=" << r << " h=" << h;
      }
      return 0;
    });
  }
}

TEST(Geoflow, JacobianDensityVanishesOnConjugateBoundary) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
    const ModelSpace m{kind, 1.0};
    with_space(m, [&](const auto& space) {
      for (int n = 0; n < 50; ++n) {
        // |h^2 + k r^2| = 4 pi^2 with h^2 + k r^2 > 0: the first conjugate time is tau = 2 pi
        const double r = kind == ModelKind::SU2 ? 0.1 + 6.0 * U(rng) : 0.1 + 3.0 * U(rng);
        const double h = std::sqrt(4.0 * kPi * kPi - m.k() * r * r);
        const double th = kTwoPi * U(rng);
        const auto d = jacobian_density(space, space.origin(), Vec3(h, r * std::cos(th), r * std::sin(th)));
        EXPECT_LE(std::abs(d.value), 1e-6) << m.name() << " r=" << r;
      }
      return 0;
    });
  }
}
