#include "sascomp/frame.hpp"
#include "sascomp/models.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sascomp;

namespace {

Vec3 random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace

TEST(Frame, HeisenbergStructureValidates) {
  const auto a = heisenberg_frame().structure(Vec3(0.3, -0.2, 1.0));
  EXPECT_TRUE(validate_structure(a).pass());
  EXPECT_TRUE(a.sasakian(1e-14));
}

TEST(Frame, FlippedBracketSignFailsOnlyThatIdentity) {
  StructureConstants a;
  a.set(1, 2, 0, 1.0);
  const auto rep = validate_structure(a);
  EXPECT_FALSE(rep.pass());
  for (const auto& e : rep.entries) EXPECT_EQ(e.pass, e.identity != "a_12^0 = -1") << e.identity;
}

TEST(Frame, GroupAlgebrasFromMatrixBrackets) {
  for (double c : {0.5, 1.0, 1.7}) {
    const auto su2 = su2_space(c).algebra();
    const auto sl2 = sl2_space(c).algebra();
    EXPECT_TRUE(validate_structure(su2).pass());
    EXPECT_TRUE(validate_structure(sl2).pass());
    EXPECT_NEAR(su2(0, 1, 2), -c * c, 1e-13);
    EXPECT_NEAR(su2(0, 2, 1), c * c, 1e-13);
    EXPECT_NEAR(sl2(0, 1, 2), c * c, 1e-13);
    EXPECT_NEAR(sl2(0, 2, 1), -c * c, 1e-13);
    EXPECT_TRUE(su2.sasakian(1e-13));
    EXPECT_TRUE(sl2.sasakian(1e-13));
  }
}

TEST(Frame, FiniteDifferenceBracketsMatchSuppliedStructure) {
  for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
    const ModelSpace m{kind, 1.3};
    const auto frame = m.chart_frame();
    const Vec3 x(0.2, -0.4, 0.3);
    const auto diff = frame.structure(x) - frame.structure_fd(x);
    EXPECT_LT(diff.max_abs(), 1e-8) << m.name();
  }
}

TEST(Frame, ModelCurvatureValues) {
  std::mt19937_64 rng(7);
  for (double c : {0.7, 1.0, 2.0}) {
    for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
      const ModelSpace m{kind, c};
      const auto frame = m.chart_frame();
      for (int n = 0; n < 10; ++n) {
        const Vec3 x = random_point(rng, 1.0);
        EXPECT_NEAR(tanaka_webster_kappa(frame, x), m.k(), 1e-10) << m.name();
        EXPECT_NEAR(riemannian_kappa_oracle(frame, x), m.k(), 1e-10) << m.name();
      }
    }
  }
}

TEST(Frame, RotatedFramesAgreeAcrossOracles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
    const ModelSpace m{kind, 1.0};
    const double w0 = u(rng), w1 = u(rng), w2 = u(rng), phase = u(rng);
    const auto frame = rotate_horizontal(m.chart_frame(), [=](const Vec3& x) {
      return 0.3 * std::sin(w0 * x(0) + w1 * x(1) + w2 * x(2) + phase);
    });
    for (int n = 0; n < 5; ++n) {
      const Vec3 x = random_point(rng, 0.5);
      const double tw = tanaka_webster_kappa(frame, x);
      const double rm = riemannian_kappa_oracle(frame, x);
      EXPECT_NEAR(tw, rm, 1e-6);
      EXPECT_NEAR(tw, m.k(), 1e-6);
      EXPECT_TRUE(validate_structure(frame.structure(x), 1e-7).pass());
    }
  }
}

TEST(Frame, ReebInvariant) {
  StructureConstants a;
  a.set(1, 2, 0, -1.0);
  a.set(0, 1, 1, 1.0);
  a.set(0, 2, 2, -1.0);
  EXPECT_DOUBLE_EQ(reeb_invariant_a(a, Vec3(0.0, 1.0, 0.0)), -1.0);
  EXPECT_FALSE(a.sasakian(1e-12));
  const auto su2 = su2_space(1.4).algebra();
  for (int n = 0; n < 32; ++n) {
    const double th = kTwoPi * n / 32.0;
    EXPECT_LE(std::abs(reeb_invariant_a(su2, Vec3(0.3, std::cos(th), std::sin(th)))), 1e-12);
  }
}
