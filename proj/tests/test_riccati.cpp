#include "sascomp/riccati.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sascomp;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST(Riccati, InitialCondition) {
  const auto jm = integrate_AB(constant_profile(1.0, 1.0, 1.0), {0.0});
  EXPECT_EQ(jm.A[0], Mat3::Identity());
  EXPECT_EQ(jm.B[0], Mat3::Zero());
  EXPECT_EQ(closed_form_U(1.0, 1.0, 1.0, 0.0), Mat3::Zero());
}

TEST(Riccati, ParabolicClosedForms) {
  Mat3 U, S;
  U << -1, -0.5, 0, -0.5, -1.0 / 3.0, 0, 0, 0, -1;
  S << -4, 6, 0, 6, -12, 0, 0, 0, -1;
  EXPECT_LT((closed_form_U(0.0, 0.0, 1.0, 1.0) - U).norm(), 1e-14);
  EXPECT_LT((closed_form_S(0.0, 0.0, 1.0, 1.0) - S).norm(), 1e-13);
  EXPECT_NEAR(det_B_closed(0.0, 0.0, 1.0, 1.0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(det_B_closed(0.0, kTwoPi, 1.0, 1.0), 0.0, 1e-15);
  // sigma = 0 with k != 0 (h0^2 = -2Hk)
  EXPECT_LT((closed_form_S(-0.5, 1.0, 1.0, 1.0) - S).norm(), 1e-8);
}

TEST(Riccati, SmallTauApproachesParabolic) {
  for (double tau : {1e-1, 1e-2, 1e-3}) {
    const Mat3 S = closed_form_S(0.0, tau, 1.0, 1.0);
    const Mat3 S0 = closed_form_S(0.0, 0.0, 1.0, 1.0);
    EXPECT_LT((S - S0).cwiseAbs().maxCoeff(), 2.0 * tau * tau);
  }
}

TEST(Riccati, ClosedFormsMatchLinearSystem) {
  double worst_u = 0.0, worst_s = 0.0, worst_det = 0.0;
  for (double k = -4.0; k <= 4.0; k += 1.0)
    for (double h0 = -3 * kPi; h0 <= 3 * kPi + 1e-9; h0 += 0.75 * kPi)
      for (double H : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const double sigma = h0 * h0 + 2 * H * k;
        const double tmax = sigma > 0 ? std::min(1.0, 0.95 * (kPi / 2) / std::sqrt(sigma)) : 1.0;
        const auto times = linspace(0.0, tmax, 12);
        const auto jm = integrate_AB(constant_profile(k, h0, H), times);
        const auto ric = integrate_riccati_U(constant_profile(k, h0, H), times);
        ASSERT_FALSE(ric.blowup_time.has_value());
        for (std::size_t i = 1; i < times.size(); ++i) {
          const double t = times[i];
          const Mat3 Uc = closed_form_U(k, h0, H, t);
          worst_u = std::max(worst_u, relative_entry_error(Uc, jm.U(i)));
          worst_u = std::max(worst_u, relative_entry_error(Uc, ric.U[i]));
          EXPECT_LE((ric.U[i] - ric.U[i].transpose()).cwiseAbs().maxCoeff(), 1e-10);
          worst_s = std::max(worst_s, relative_entry_error(closed_form_S(k, h0, H, t), jm.S(i)));
          const double d = std::abs(jm.B[i].determinant());
          worst_det = std::max(worst_det, std::abs(det_B_closed(k, h0, H, t) - d));
          EXPECT_LT(relative_entry_error(closed_form_S(k, h0, H, t) * Uc, Mat3::Identity()), 1e-10);
        }
      }
  EXPECT_LE(worst_u, 1e-8);
  EXPECT_LE(worst_s, 1e-8);
  EXPECT_LE(worst_det, 1e-9);
}

TEST(Riccati, HyperbolicBranch) {
  const double k = -2.0, h0 = 0.5, H = 1.0;  // sigma = -3.75
  const auto jm = integrate_AB(constant_profile(k, h0, H), {0.0, 0.7, 1.0});
  EXPECT_LT(relative_entry_error(closed_form_U(k, h0, H, 1.0), jm.U(2)), 1e-10);
}

TEST(Riccati, BlowupIsReported) {
  // sigma = 1: cos(tau_t) = 0 at t = pi/2
  const auto ric = integrate_riccati_U(constant_profile(0.0, 1.0, 1.0), linspace(0.0, 2.0, 21));
  ASSERT_TRUE(ric.blowup_time.has_value());
  EXPECT_NEAR(*ric.blowup_time, kPi / 2, 1e-3);
  EXPECT_THROW(closed_form_U(0.0, 1.0, 1.0, kPi / 2), Error);
  EXPECT_THROW(closed_form_S(0.0, kTwoPi, 1.0, 1.0), Error);
}

TEST(Riccati, ComparisonEqualProfiles) {
  const auto p = constant_profile(0.5, 1.0, 1.0);
  const auto rep = riccati_compare(p, p, linspace(0.0, 1.0, 21));
  EXPECT_TRUE(rep.pass());
  for (const auto& s : rep.samples)
    if (s.label != "-U_lower >= 0") {
      EXPECT_LE(std::abs(s.margin), 1e-9) << s.label << " t=" << s.parameter;
    }
}

TEST(Riccati, ComparisonBumpProfile) {
  const double k = 0.3, h0 = 0.8, H = 0.7, delta = 0.4;
  const auto lower = constant_profile(k, h0, H);
  const auto upper =
      sasakian_profile(h0, H, [=](double t) { return k + delta * std::pow(std::sin(kPi * t), 2); });
  const auto rep = riccati_compare(lower, upper, linspace(0.0, 1.0, 41));
  EXPECT_TRUE(rep.hypotheses_hold);
  EXPECT_TRUE(rep.pass()) << rep.min_margin();
  const auto swapped = riccati_compare(upper, lower, linspace(0.0, 1.0, 41));
  EXPECT_FALSE(swapped.hypotheses_hold);
}
