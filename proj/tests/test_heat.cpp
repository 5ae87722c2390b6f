#include "sascomp/heat.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sascomp;

TEST(Phi, Values) {
  EXPECT_NEAR(phi(0.0, 2.0), 2.0, 1e-14);
  EXPECT_NEAR(phi(1e-12, 1.0), 4.0, 1e-6);
  // sqrt(k)(sin - s sqrt(k) cos)/(2 - 2cos - s sqrt(k) sin) at k = 1, s = pi: pi / 4
  EXPECT_NEAR(phi(1.0, kPi), kPi / 4.0, 1e-13);
  for (double k : {0.3, 1.0, 2.5})
    for (double s : {0.2, 1.0, 2.0}) {
      const double q = s * std::sqrt(k);
      const double direct =
          std::sqrt(k) * (std::sin(q) - q * std::cos(q)) / (2.0 - 2.0 * std::cos(q) - q * std::sin(q));
      EXPECT_NEAR(phi(k, s), direct, 1e-9 * std::abs(direct)) << k << " " << s;
    }
  EXPECT_THROW(phi(1.0, kTwoPi), Error);
  EXPECT_THROW(phi(-1.0, 1.0), Error);
  EXPECT_THROW(phi(0.0, 0.0), Error);
}

TEST(Phi, SmallArgumentSeriesIsContinuous) {
  // phi s = 4 (1 - x/10)/(1 - x/15) + O(x^2) = 4 - 2x/15 + O(x^2), x = k s^2
  for (double x : {1e-10, 1e-6, 1e-4, 1e-2}) {
    const double s = 1.0, k = x;
    EXPECT_NEAR(phi(k, s) * s, 4.0 - 2.0 * x / 15.0, 1e-2 * x * x + 1e-13) << x;
  }
}

TEST(Barrier, ClosedFormSolvesRadialEquation) {
  EXPECT_LE(std::abs(remark_residual(0.5, 1.0, 0.1)), 1e-12);
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 49; ++j) {
      const double t = 2.0 * i / 40.0, s = 0.1 + 4.9 * j / 49.0;
      worst = std::max(worst, std::abs(remark_residual(t, s, 0.1)));
    }
  EXPECT_LE(worst, 1e-10);
  EXPECT_LE(std::abs(remark_residual(0.3, 40.0, 0.1)), 1e-200);
  EXPECT_THROW(remark_residual(0.1, 0.0, 0.1), Error);
}

TEST(RadialPde, TracksClosedForm) {
  const double eps = 0.1;
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(0.05 * i);
  const auto bar = solve_comparison_pde(
      0.0, [eps](double s) { return remark_barrier(0.0, s, eps); },
      [eps](double t, double s) { return remark_barrier(t, s, eps); }, times);
  double worst = 0.0;
  for (std::size_t n = 0; n < bar.t.size(); ++n)
    for (std::size_t j = 0; j < bar.s.size(); ++j)
      worst = std::max(worst, std::abs(bar.h[n][j] - remark_barrier(bar.t[n], bar.s[j], eps)));
  EXPECT_LT(worst, 1e-5);
  EXPECT_TRUE(bar.monotone);
  EXPECT_LT(bar.derivative_equation_residual, 5e-3);  // differences of a differenced field
}

TEST(RadialPde, ConstantStaysConstant) {
  const auto bar = solve_comparison_pde(
      0.0, [](double) { return 2.5; }, [](double, double) { return 2.5; }, {0.0, 0.1, 0.5});
  for (const auto& row : bar.h)
    for (double v : row) EXPECT_NEAR(v, 2.5, 1e-12);
}

TEST(RadialPde, MonotoneDataStaysMonotone) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double k : {0.0, 0.25, 1.0}) {
    for (int trial = 0; trial < 3; ++trial) {
      // sum of decreasing logistic steps with random centres, widths and heights
      std::vector<std::array<double, 3>> steps;
      for (int i = 0; i < 4; ++i) steps.push_back({0.5 + 4.0 * U(rng), 0.2 + 0.5 * U(rng), 0.2 + U(rng)});
      auto init = [steps](double s) {
        double v = 0.0;
        for (const auto& st : steps) v += st[2] / (1.0 + std::exp((s - st[0]) / st[1]));
        return v;
      };
      RadialOptions opt;
      opt.s_max = std::min(6.0, 0.9 * kTwoPi / std::sqrt(std::max(k, 1e-12)));
      opt.nodes = 300;
      const double edge = init(opt.s_max);
      const auto bar = solve_comparison_pde(k, init, [edge](double, double) { return edge; }, {0.0, 0.05, 0.2, 0.5},
                                            opt);
      EXPECT_TRUE(bar.monotone) << "k " << k << " max h' " << bar.max_h_prime;
    }
  }
}

TEST(RadialPde, RejectsDomainPastThePole) {
  RadialOptions opt;
  opt.s_max = 7.0;
  EXPECT_THROW(solve_comparison_pde(1.0, [](double) { return 0.0; }, [](double, double) { return 0.0; }, {0.0, 1.0},
                                    opt),
               Error);
}

namespace {

HeatGrid cube(int n, int order, double half = 1.0) {
  HeatGrid g;
  g.lo = Vec3(-half, -half, -half);
  g.hi = Vec3(half, half, half);
  g.nx = g.ny = g.nz = n;
  g.order = order;
  return g;
}

std::vector<char> box_interior(const HeatGrid& g) {
  std::vector<char> in(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) in[n] = !g.on_face(n, g.order / 2);
  return in;
}

}  // namespace

TEST(SrHeat, StencilOrder) {
  // f = sin(x + z) cos(y - z); with A = x + z, B = y - z:
  // X1^2 f + X2^2 f = -2 sin A cos B - ((x^2 + y^2)/2) sin(A - B) + (x + y) sin(A - B)
  auto f = [](const Vec3& p) { return std::sin(p(0) + p(2)) * std::cos(p(1) - p(2)); };
  auto lap = [](const Vec3& p) {
    const double A = p(0) + p(2), B = p(1) - p(2);
    return -2.0 * std::sin(A) * std::cos(B) - 0.5 * (p(0) * p(0) + p(1) * p(1)) * std::sin(A - B) +
           (p(0) + p(1)) * std::sin(A - B);
  };
  for (int order : {2, 4}) {
    std::vector<double> err;
    for (int n : {17, 33}) {
      const HeatGrid g = cube(n, order);
      std::vector<double> u(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) u[i] = f(g.point(i));
      double e = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.on_face(i, 2)) continue;
        const Vec3 p = g.point(i);
        e = std::max(e, std::abs(heisenberg_sublaplacian(g, u, i, p(0), p(1)) - lap(p)));
      }
      err.push_back(e);
    }
    const double observed = std::log2(err[0] / err[1]);
    EXPECT_NEAR(observed, order, 0.3) << "order " << order;
  }
}

TEST(SrHeat, ConstantSolutionIsStationary) {
  const HeatGrid g = cube(12, 2);
  const auto in = box_interior(g);
  const auto sol = solve_sr_heat(g, in, std::vector<double>(g.size(), 3.0), [](double, std::size_t) { return 3.0; },
                                 {0.0, 0.05});
  for (const auto& snap : sol.snapshots)
    for (double v : snap) EXPECT_NEAR(v, 3.0, 1e-12);
}

TEST(SrHeat, MassDoesNotIncreaseWithZeroDirichletData) {
  for (int order : {2, 4}) {
    const HeatGrid g = cube(20, order, 2.0);
    const auto in = box_interior(g);
    std::vector<double> u0(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3 p = g.point(n);
      u0[n] = in[n] ? std::exp(-2.0 * (p(0) * p(0) + p(1) * p(1)) - 8.0 * p(2) * p(2)) : 0.0;
    }
    std::vector<double> times;
    for (int i = 0; i <= 10; ++i) times.push_back(0.02 * i);
    const auto sol = solve_sr_heat(g, in, u0, [](double, std::size_t) { return 0.0; }, times);
    for (std::size_t s = 1; s < sol.snapshots.size(); ++s)
      EXPECT_LE(heat_mass(g, sol.snapshots[s]), heat_mass(g, sol.snapshots[s - 1]) * (1.0 + 1e-12)) << order;
  }
}

TEST(SrHeat, RefinementShowsSecondOrder) {
  // Smooth bump, zero data on a wide box; compare coincident nodes of three nested grids.
  auto bump = [](const Vec3& p) { return std::exp(-(p(0) * p(0) + p(1) * p(1)) - 4.0 * p(2) * p(2)); };
  std::vector<HeatSolution> sols;
  const std::vector<int> sizes{13, 25, 49};
  for (int n : sizes) {
    HeatGrid g = cube(n, 2, 3.0);
    const auto in = box_interior(g);
    std::vector<double> u0(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u0[i] = bump(g.point(i));
    sols.push_back(solve_sr_heat(g, in, u0, [](double, std::size_t) { return 0.0; }, {0.0, 0.1}));
  }
  auto coarse_diff = [&](std::size_t a, std::size_t b) {
    const HeatGrid& gc = sols[0].grid;
    const HeatGrid& ga = sols[a].grid;
    const HeatGrid& gb = sols[b].grid;
    const int fa = (ga.nx - 1) / (gc.nx - 1), fb = (gb.nx - 1) / (gc.nx - 1);
    double e = 0.0;
    for (int l = 0; l < gc.nz; ++l)
      for (int j = 0; j < gc.ny; ++j)
        for (int i = 0; i < gc.nx; ++i)
          e = std::max(e, std::abs(sols[a].snapshots.back()[ga.index(i * fa, j * fa, l * fa)] -
                                   sols[b].snapshots.back()[gb.index(i * fb, j * fb, l * fb)]));
    return e;
  };
  const double d01 = coarse_diff(0, 1), d12 = coarse_diff(1, 2);
  EXPECT_GT(std::log2(d01 / d12), 1.6) << d01 << " " << d12;
}

TEST(SrHeat, RejectsUnstableStepAndBadMasks) {
  HeatGrid g = cube(12, 2);
  const auto in = box_interior(g);
  g.dt = 1.0;
  EXPECT_THROW(solve_sr_heat(g, in, std::vector<double>(g.size(), 0.0), [](double, std::size_t) { return 0.0; },
                             {0.0, 0.1}),
               Error);
  g.dt = 0.0;
  std::vector<char> all(g.size(), 1);
  EXPECT_THROW(solve_sr_heat(g, all, std::vector<double>(g.size(), 0.0), [](double, std::size_t) { return 0.0; },
                             {0.0, 0.1}),
               Error);
}

TEST(CheegerYau, TrivialBarrierPasses) {
  const HeatGrid g = cube(12, 2);
  const auto in = box_interior(g);
  const auto sol = solve_sr_heat(g, in, std::vector<double>(g.size(), 1.0), [](double, std::size_t) { return 1.0; },
                                 {0.0, 0.02});
  std::vector<double> r(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = heisenberg_distance(g.point(n));
  const auto rep = cheeger_yau_check(sol, [](double, double) { return -1e30; }, r);
  EXPECT_TRUE(rep.hypotheses_hold);
  EXPECT_TRUE(rep.pass());
}

TEST(CheegerYau, ViolatedHypothesisIsFlagged) {
  const HeatGrid g = cube(12, 2);
  const auto in = box_interior(g);
  const auto sol = solve_sr_heat(g, in, std::vector<double>(g.size(), 0.0), [](double, std::size_t) { return 1.0; },
                                 {0.0, 0.02});
  std::vector<double> r(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = heisenberg_distance(g.point(n));
  const auto rep = cheeger_yau_check(sol, [](double, double) { return 0.5; }, r);
  EXPECT_FALSE(rep.hypotheses_hold);
}

TEST(CheegerYau, CoarsePipelineMarginImprovesUnderRefinement) {
  CheegerYauSetup cfg;
  cfg.snapshots = 10;
  cfg.n = 24;
  const auto coarse = cheeger_yau_pipeline(cfg);
  cfg.n = 32;
  const auto fine = cheeger_yau_pipeline(cfg);
  EXPECT_TRUE(coarse.report.hypotheses_hold);
  EXPECT_TRUE(fine.report.hypotheses_hold);
  EXPECT_GE(fine.report.min_margin(), coarse.report.min_margin());
  // late-time margins are positive: the barrier is a strict subsolution away from the z = 0 plane
  EXPECT_GT(fine.report.samples.back().margin, 0.0);
}
