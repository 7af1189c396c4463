#include <gtest/gtest.h>

#include <random>

#include "kernelwave/verify.hpp"

using namespace kernelwave;

TEST(Fit, ExactPowerLaw) {
  std::vector<double> xs{4, 5.5, 7, 8.5, 10}, ys;
  for (double x : xs)
    ys.push_back(2.5 * std::pow(x, -3.0));
  const SlopeFit f = fit_loglog_slope(xs, ys);
  EXPECT_NEAR(f.slope, -3.0, 1e-12);
  EXPECT_LT(f.stderr_, 1e-12);
  EXPECT_EQ(f.points, 5);
}

TEST(Fit, ConstantData) {
  EXPECT_NEAR(fit_loglog_slope({1, 2, 3, 4}, {0.7, 0.7, 0.7, 0.7}).slope, 0.0, 1e-14);
}

TEST(Fit, SmallPerturbation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-0.01, 0.01);
  std::vector<double> xs, ys;
  for (double x = 4; x <= 14; x += 1.5) {
    xs.push_back(x);
    ys.push_back(std::pow(x, -1.5) * (1 + d(rng)));
  }
  EXPECT_NEAR(fit_loglog_slope(xs, ys).slope, -1.5, 0.05);
}

TEST(Fit, Failures) {
  EXPECT_THROW(fit_loglog_slope({1, 2}, {1, 2}), FitError);
  EXPECT_THROW(fit_loglog_slope({1, 2, 3}, {1, 0, -1}), FitError);
  EXPECT_THROW(fit_loglog_slope({2, 2, 2}, {1, 2, 3}), FitError);
  EXPECT_THROW(fit_loglog_slope({1, 2, 3}, {1, 2}), FitError);
}

TEST(FitModes, Names) {
  for (FitMode m : {FitMode::automatic, FitMode::plain, FitMode::rms_phase, FitMode::max_phase})
    EXPECT_EQ(parse_fit_mode(to_string(m)), m);
  EXPECT_THROW(parse_fit_mode("median"), UsageError);
}

TEST(Study, Validation) {
  EXPECT_THROW(residual_study(Transition::airy_to_s1, {}, {4, 5}, 1), UsageError);
  EXPECT_THROW(residual_study(Transition::airy_to_s1, {}, {4, 6, 5}, 1), UsageError);
  EXPECT_THROW(residual_study(Transition::airy_to_s1, {}, {4, 5, 6}, -1), UsageError);
}

TEST(Study, TableShapeAndLeadingRate) {
  StudyOptions so;
  so.fit = FitMode::plain;
  const auto tab = residual_study(Transition::airy_to_s1, {0.3, -0.2, 0.1, 0.05}, {4, 6, 8, 10}, 1,
                                  Backend::direct, {}, so);
  ASSERT_EQ(tab.residuals.size(), 2u);
  ASSERT_EQ(tab.slopes.size(), 2u);
  EXPECT_EQ(tab.residuals[0].size(), 4u);
  EXPECT_EQ(tab.fit_used[0], FitMode::plain);
  EXPECT_TRUE(tab.envelopes[0].empty());
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_LT(tab.residuals[1][i], tab.residuals[0][i]);
  EXPECT_LT(tab.slopes[1], tab.slopes[0]);
}

TEST(Study, NoiseFloorIsReported) {
  StudyOptions so;
  so.fit = FitMode::plain;
  so.noise_factor = 1e30;
  EXPECT_THROW(residual_study(Transition::airy_to_s1, {}, {4, 6, 8}, 0, Backend::direct, {}, so),
               InsufficientPrecisionError);
}

TEST(Study, Windows) {
  EXPECT_EQ(slope_window(Transition::airy_to_s1, 2)->first, -4.9);
  EXPECT_EQ(slope_window(Transition::pearcey_to_s2, 0)->second, -1.15);
  EXPECT_FALSE(slope_window(Transition::pearcey_to_s2, 2).has_value());
}

TEST(CrossValidate, KernelRows) {
  std::vector<KernelQuery> qs;
  for (KernelId k : {KernelId::airy_ext, KernelId::pearcey_ext, KernelId::sine_ext, KernelId::s1, KernelId::s2}) {
    KernelQuery q;
    q.kernel = k;
    q.tau1 = 0.4;
    q.tau2 = -0.3;
    q.u = 0.2;
    q.v = -0.5;
    qs.push_back(q);
  }
  KernelQuery t = qs[1];
  t.kernel = KernelId::transition;
  t.a_param = 0.0;
  qs.push_back(t);
  const auto rows = cross_validate(qs);
  ASSERT_EQ(rows.size(), qs.size());
  for (const auto& r : rows)
    EXPECT_FALSE(r.flagged) << r.label << " " << r.discrepancy;
  t.a_param = 1.0;
  EXPECT_THROW(cross_validate({t}), UsageError);
}

TEST(CrossValidate, RescaledRows) {
  const auto rows = cross_validate_lhs(Transition::pearcey_to_s2, {{0.1, 0.2, -0.1, 0.3}}, {3.0, 6.0});
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows)
    EXPECT_LT(r.discrepancy, 1e-8) << r.label;
}

TEST(Parallel, RethrowsFirstFailure) {
  EXPECT_THROW(parallel_for(
                   8, [](std::size_t i) {
                     if (i == 3)
                       throw FitError("boom");
                   },
                   4),
               FitError);
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] = 1; }, 3);
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 100);
}
