#include "sascomp/distops.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sascomp;

namespace {

const ModelSpace kHeis{ModelKind::Heisenberg, 1.0};

std::vector<Vec3> interior_covectors(const ModelSpace& m, int n, unsigned seed) {
  return sample_interior_covectors(m, n, seed);
}

}  // namespace

TEST(Distance, HeisenbergHorizontalUnitPoint) {
  const auto sp = heisenberg_space();
  const auto d = distance(sp, kHeis, Vec3::Zero(), Vec3(1.0, 0.0, 0.0));
  EXPECT_NEAR(d.r, 1.0, 1e-9);
  EXPECT_NEAR(d.alpha(0), 0.0, 1e-8);
  EXPECT_TRUE(d.in_domain);
}

TEST(Distance, HeisenbergAxisPointsAreCutPoints) {
  const auto sp = heisenberg_space();
  for (double z : {0.05, 0.3, -1.0}) {
    const auto d = distance(sp, kHeis, Vec3::Zero(), Vec3(0.0, 0.0, z));
    EXPECT_NEAR(d.r, std::sqrt(4.0 * kPi * std::abs(z)), 1e-7) << z;
    EXPECT_NEAR(std::abs(d.alpha(0)), kTwoPi, 1e-6);
    EXPECT_FALSE(d.in_domain);
    EXPECT_NEAR(heisenberg_distance(Vec3(0.0, 0.0, z)), d.r, 1e-7);
  }
}

TEST(Distance, HeisenbergClosedFormAgreesWithShooting) {
  const auto sp = heisenberg_space();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec3 p(U(rng), U(rng), 0.3 * U(rng));
    const auto d = distance(sp, kHeis, Vec3::Zero(), p);
    EXPECT_NEAR(heisenberg_distance(p), d.r, 1e-8) << p.transpose();
  }
}

TEST(Distance, RoundTripOnAllModels) {
  for (const ModelSpace m : {kHeis, ModelSpace{ModelKind::SU2, 1.0}, ModelSpace{ModelKind::SL2, 1.0},
                             ModelSpace{ModelKind::SU2, 0.7}, ModelSpace{ModelKind::SL2, 1.3}}) {
    with_space(m, [&](const auto& sp) {
      for (const Vec3& a : interior_covectors(m, 5, 3)) {
        const auto z = exp_map(sp, sp.origin(), a, 1.0, FlowOptions{1e-13});
        const auto d = distance(sp, m, sp.origin(), z);
        EXPECT_NEAR(d.r, std::hypot(a(1), a(2)), 1e-7) << m.name() << " " << a.transpose();
        EXPECT_LT((d.alpha - a).norm(), 1e-6) << m.name();
        EXPECT_TRUE(d.in_domain);
      }
      return 0;
    });
  }
}

TEST(Hessian, LinearChartFunctionMatchesDirectFormulas) {
  // f = x + 2y + 3z on Heisenberg: v0 f = -3, v1 f = 1 - 3y/2, v2 f = 2 + 3x/2.
  const auto sp = heisenberg_space();
  const Vec3 p(0.3, -0.2, 0.5);
  auto f = [](const Vec3& q) { return q(0) + 2.0 * q(1) + 3.0 * q(2); };
  const auto h = sr_hessian_fd_values<ChartSpace>(sp, f, p);
  const double x = p(0), y = p(1);
  const Vec3 g(-3.0, 1.0 - 1.5 * y, 2.0 + 1.5 * x);
  Mat3 D = Mat3::Zero();
  // v_i v_j f with v1 = d_x - y/2 d_z, v2 = d_y + x/2 d_z, v0 = -d_z
  D(1, 2) = 1.5;   // v1(2 + 3x/2)
  D(2, 1) = -1.5;  // v2(1 - 3y/2)
  EXPECT_LT((h.grad - g).norm(), 1e-7);
  EXPECT_LT((h.second - D).cwiseAbs().maxCoeff(), 1e-6);
  const auto exact = hessian_from_derivatives(sp.structure(p), g, D);
  EXPECT_LT((h.H - exact.H).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT(h.symmetry_residual, 1e-6);
  EXPECT_LT(h.trace_residual, 1e-9);
}

TEST(Hessian, SpaceFormSigmaZeroMatrix) {
  const Mat3 h = hessian_space_form(0.0, -2.0, 0.0);
  Mat3 expect = Mat3::Zero();
  expect(0, 0) = -4.0;
  expect(0, 1) = expect(1, 0) = -6.0;
  expect(1, 1) = -12.0;
  expect(2, 2) = -1.0;
  EXPECT_LT((h - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(sublaplacian_r_space_form(0.0, 2.0, 0.0), 2.0, 1e-12);
  EXPECT_NEAR(sublaplacian_r_space_form(1.0, 1.0, 0.0), kernel::e1(1.0) / kernel::d2(1.0), 1e-12);
  EXPECT_THROW(hessian_space_form(0.0, 1.0, 0.0), Error);
  EXPECT_THROW(sublaplacian_r_space_form(0.0, 0.0, 1.0), Error);
}

TEST(Hessian, DsMatchesSpaceFormOnModels) {
  for (const ModelSpace m : {kHeis, ModelSpace{ModelKind::SU2, 1.0}, ModelSpace{ModelKind::SL2, 1.0}}) {
    with_space(m, [&](const auto& sp) {
      for (const Vec3& a : interior_covectors(m, 4, 5)) {
        const auto z = exp_map(sp, sp.origin(), a, 1.0, FlowOptions{1e-13});
        const auto d = distance_from_guess(sp, m, sp.origin(), z, a);
        const auto h = ds_hessian(sp, m, sp.origin(), z, d);
        const Mat3 ref = hessian_space_form(m.k(), -0.5 * d.r * d.r, -d.alpha_end(0));
        EXPECT_LT(relative_entry_error(h.H, ref), 1e-3) << m.name() << "\n" << h.H << "\n" << ref;
        EXPECT_NEAR(h.H(2, 2), -1.0, 1e-6);
        EXPECT_NEAR(h.H(0, 2), 0.0, 1e-6);
        EXPECT_NEAR(h.H(1, 2), 0.0, 1e-6);
        EXPECT_LT(h.symmetry_residual, 1e-8) << m.name();
        EXPECT_LT(h.trace_residual, 1e-8);
        EXPECT_NEAR(sublaplacian_r_from_ds(h, d.r), sublaplacian_r_space_form(m.k(), d.r, d.v0r),
                    1e-5 * std::max(1.0, std::abs(sublaplacian_r_space_form(m.k(), d.r, d.v0r))));
      }
      return 0;
    });
  }
}

double min_laplacian_margin(const ComparisonReport& rep) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples)
    if (s.label == "Delta_H r vs space form") m = std::min(m, s.margin);
  return m;
}

// The Hessian order has a common -1 eigendirection, so only the Laplacian margins are strictly positive.
TEST(Hessian, LaplacianComparisonSigns) {
  const ModelSpace su2{ModelKind::SU2, 1.0}, sl2{ModelKind::SL2, 1.0};
  const auto rep_su2 = laplacian_compare(su2_space(1.0), su2, 0.0, interior_covectors(su2, 3, 9));
  EXPECT_TRUE(rep_su2.pass());
  EXPECT_GT(min_laplacian_margin(rep_su2), 1e-3);
  const auto rep_sl2 = laplacian_compare(sl2_space(1.0), sl2, 0.0, interior_covectors(sl2, 3, 9));
  EXPECT_TRUE(rep_sl2.pass());
  EXPECT_GT(min_laplacian_margin(rep_sl2), 1e-3);
  for (const auto* rep : {&rep_su2, &rep_sl2})
    for (const auto& s : rep->samples)
      if (s.label == "Hess ds vs space form") {
        EXPECT_LE(s.margin, 1e-8);  // the shared -1 eigendirection caps the margin at zero
      }
  const auto rep_eq = laplacian_compare(heisenberg_space(), kHeis, 0.0, interior_covectors(kHeis, 3, 9));
  EXPECT_TRUE(rep_eq.pass());
  EXPECT_LT(rep_eq.max_abs_margin(), 1e-5);
}

TEST(Distance, ReebDerivativeMatchesFiniteDifference) {
  for (const ModelSpace m : {kHeis, ModelSpace{ModelKind::SU2, 1.0}, ModelSpace{ModelKind::SL2, 1.0}}) {
    with_space(m, [&](const auto& sp) {
      for (const Vec3& a : interior_covectors(m, 3, 21)) {
        const auto z = exp_map(sp, sp.origin(), a, 1.0, FlowOptions{1e-13});
        const auto d = distance_from_guess(sp, m, sp.origin(), z, a);
        const double e = 1e-4;
        const double rp = distance_from_guess(sp, m, sp.origin(), sp.move(z, 0, e), d.alpha).r;
        const double rm = distance_from_guess(sp, m, sp.origin(), sp.move(z, 0, -e), d.alpha).r;
        EXPECT_NEAR((rp - rm) / (2.0 * e), d.v0r, 1e-6) << m.name();
      }
      return 0;
    });
  }
}

// Covectors drawn across the injectivity domain (r in [0.1, 2], |h| away from both ends
// of its admissible range) are recovered by the multistart distance.
TEST(Distance, RoundTripProperty) {
  for (const ModelSpace m : {kHeis, ModelSpace{ModelKind::SU2, 1.0}, ModelSpace{ModelKind::SL2, 1.0}}) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto dom = injectivity_domain(m, 2.0);
    int worst_count = 0;
    double worst = 0.0;
    with_space(m, [&](const auto& sp) {
      for (int n = 0; n < 500; ++n) {
        const double r = 0.1 + 1.9 * U(rng);
        const auto [lo, hi] = dom.h_range(r);
        const double h = (lo + (hi - lo) * (0.05 + 0.9 * U(rng))) * (U(rng) < 0.5 ? -1.0 : 1.0);
        const double th = kTwoPi * U(rng);
        const Vec3 a(h, r * std::cos(th), r * std::sin(th));
        const auto z = exp_map(sp, sp.origin(), a, 1.0, FlowOptions{1e-13});
        const double err = std::abs(distance(sp, m, sp.origin(), z).r - r);
        worst = std::max(worst, err);
        if (err > 1e-7) ++worst_count;
      }
      return 0;
    });
    EXPECT_EQ(worst_count, 0) << m.name() << " worst " << worst;
  }
}
