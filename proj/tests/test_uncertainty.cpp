// Copyright 2026 The imbeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "imbeval/uncertainty.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace imbeval {
namespace {

using testing::HighPrecision;
using testing::precision_hp;

constexpr auto P = Label::positive;
constexpr auto N = Label::negative;

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Draw {
  RateEstimate tpr;
  RateEstimate fpr;
};

// Valid bound inputs: rates spread over several decades, CVs in [0, 0.95).
Draw random_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tpr = 0.01 + 0.99 * unit(rng);
  const double fpr = std::pow(10.0, -6.0 * unit(rng));
  return {RateEstimate(tpr, tpr * 0.95 * unit(rng)), RateEstimate(fpr, fpr * 0.95 * unit(rng))};
}

TEST(RateEstimate, Validation) {
  EXPECT_THROW(RateEstimate(1.5, 0.1), std::invalid_argument);
  EXPECT_THROW(RateEstimate(0.5, -0.1), std::invalid_argument);
  EXPECT_THROW(RateEstimate(0.5, 0.1, 1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(RateEstimate(0.6, 0.06).cv(), 0.1);
  EXPECT_FALSE(RateEstimate(0.0, 0.0).strictly_bounded());
  EXPECT_FALSE(RateEstimate(0.1, 0.1).strictly_bounded());
}

TEST(PrecisionBand, DegenerateIntervalsCollapse) {
  const auto b = precision_band({0.6, 0.0}, {1e-3, 0.0}, Prevalence(0.01));
  EXPECT_EQ(b.lower, b.point);
  EXPECT_EQ(b.upper, b.point);
}

TEST(PrecisionBand, CornersAgainstHighPrecisionOracle) {
  // Frozen 50-digit corner evaluations.
  const HighPrecision e("0.001");
  const double lo = precision_hp(HighPrecision("0.54"), HighPrecision("0.0011"), e).convert_to<double>();
  const double pt = precision_hp(HighPrecision("0.6"), HighPrecision("0.001"), e).convert_to<double>();
  const double hi = precision_hp(HighPrecision("0.66"), HighPrecision("0.0009"), e).convert_to<double>();
  EXPECT_NEAR(lo, 0.32948929159802306425, 1e-17);
  EXPECT_NEAR(pt, 0.37523452157598499062, 1e-17);
  EXPECT_NEAR(hi, 0.42332114681547046373, 1e-17);

  const auto b = precision_band({0.6, 0.06}, {1e-3, 1e-4}, Prevalence(1e-3));
  EXPECT_NEAR(b.lower, lo, 1e-15);
  EXPECT_NEAR(b.point, pt, 1e-15);
  EXPECT_NEAR(b.upper, hi, 1e-15);
  EXPECT_FALSE(b.degenerate_upper);
}

TEST(PrecisionBand, WidthAtEtaStarIsDelta) {
  const RateEstimate tpr(0.6, 0.06), fpr(1e-3, 5e-4);
  const auto d = max_uncertainty_closed_form(tpr, fpr);
  const auto b = precision_band(tpr, fpr, Prevalence(d.eta_star));
  EXPECT_NEAR(b.upper - b.lower, d.delta, 1e-14);
}

TEST(PrecisionBand, FprIntervalAtZero) {
  const auto b = precision_band({0.6, 0.06}, {1e-3, 1e-3}, Prevalence(0.2));
  EXPECT_TRUE(b.degenerate_upper);
  EXPECT_EQ(b.upper, 1.0);
  EXPECT_LE(b.lower, b.point);
  EXPECT_THROW(precision_band({0.6, 0.06}, {1e-3, 2e-3}, Prevalence(0.2)), NumericError);
  EXPECT_THROW(max_uncertainty_closed_form({0.6, 0.06}, {1e-3, 1e-3}), NumericError);
}

TEST(PrecisionBand, CornersAreTheRectangleExtremes) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_draw(rng);
    const Prevalence eta(std::pow(10.0, -7.0 * unit(rng)) * 0.999);
    const auto b = precision_band(d.tpr, d.fpr, eta);
    // Brute-force scan of the rectangle, corners included.
    double lo = 2.0, hi = -1.0;
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const double t = d.tpr.value - d.tpr.half_width + 2.0 * d.tpr.half_width * i / 40.0;
        const double f = d.fpr.value - d.fpr.half_width + 2.0 * d.fpr.half_width * j / 40.0;
        const double p = t * eta.value() / (t * eta.value() + f * (1.0 - eta.value()));
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    EXPECT_NEAR(b.lower, lo, 1e-13);
    EXPECT_NEAR(b.upper, hi, 1e-13);
    // Analytic corner formulas 1 / (1 + x r1), 1 / (1 + x r2) with x = (1-eta)/eta.
    const auto dr = max_uncertainty_closed_form(d.tpr, d.fpr);
    const double x = (1.0 - eta.value()) / eta.value();
    EXPECT_NEAR(b.upper, 1.0 / (1.0 + x * dr.r1), 1e-13);
    EXPECT_NEAR(b.lower, 1.0 / (1.0 + x * dr.r2), 1e-13);
  }
}

TEST(MaxUncertainty, WorkedExampleEqualCvs) {
  const RateEstimate tpr(0.6, 0.06), fpr(1e-3, 1e-4);
  EXPECT_NEAR(tpr.cv(), 0.1, 1e-15);
  EXPECT_NEAR(fpr.cv(), 0.1, 1e-15);
  EXPECT_NEAR(max_uncertainty_closed_form(tpr, fpr).delta, 0.1, 1e-12);
  EXPECT_NEAR(max_uncertainty_numeric(tpr, fpr).delta, 0.1, 1e-9);
}

TEST(MaxUncertainty, FootnoteExample) {
  const auto d = max_uncertainty_closed_form({0.6, 0.06}, {1e-3, 5e-4});
  // 40-digit evaluation of the closed form.
  EXPECT_NEAR(d.delta, 0.31385933836549283504, 1e-14);
  EXPECT_NEAR(d.eta_star, 0.0014485458041463964343, 1e-16);
  EXPECT_LE(d.r1, d.r2);
  const auto n = max_uncertainty_numeric({0.6, 0.06}, {1e-3, 5e-4});
  EXPECT_NEAR(n.delta, d.delta, 1e-9 * d.delta);
  EXPECT_NEAR(n.eta_star, d.eta_star, 1e-4 * d.eta_star);
}

TEST(MaxUncertainty, ZeroWidthIsZero) {
  EXPECT_EQ(max_uncertainty_closed_form({0.6, 0.0}, {1e-3, 0.0}).delta, 0.0);
  EXPECT_EQ(max_uncertainty_numeric({0.6, 0.0}, {1e-3, 0.0}).delta, 0.0);
}

TEST(MaxUncertainty, HypothesesChecked) {
  try {
    max_uncertainty_closed_form({0.6, 0.6}, {1e-3, 1e-4});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_STREQ(e.what(), "Theorem 1 inapplicable: sigma >= point estimate");
  }
  EXPECT_THROW(max_uncertainty_numeric({0.0, 0.0}, {1e-3, 1e-4}), NumericError);
}

TEST(MaxUncertainty, ClosedFormMatchesNumericSearch) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_draw(rng);
    const auto closed = max_uncertainty_closed_form(d.tpr, d.fpr);
    const auto numeric = max_uncertainty_numeric(d.tpr, d.fpr);
    EXPECT_LE(rel_err(numeric.delta, closed.delta), 1e-9) << trial;
    const double s = std::sqrt(closed.r1 * closed.r2);
    EXPECT_NEAR(closed.eta_star, s / (1.0 + s), 1e-15);
    const double q = std::sqrt(closed.r1 / closed.r2);
    EXPECT_NEAR(closed.delta, (1.0 - q) / (1.0 + q), 1e-12);
    EXPECT_NEAR(closed.delta, max_uncertainty_from_cvs(d.tpr.cv(), d.fpr.cv()), 1e-14);
  }
}

TEST(Theorem1, BoundAndTightness) {
  auto t = theorem1_bound({0.6, 0.06}, {1e-3, 1e-4});
  EXPECT_NEAR(t.bound, 0.1, 1e-15);
  EXPECT_TRUE(t.tight);

  t = theorem1_bound({0.6, 0.06}, {1e-3, 5e-4});
  EXPECT_NEAR(t.bound, 0.5, 1e-15);
  EXPECT_FALSE(t.tight);
  EXPECT_LT(max_uncertainty_closed_form({0.6, 0.06}, {1e-3, 5e-4}).delta, 0.5);

  t = theorem1_bound({0.6, 0.0}, {1e-3, 3e-4});
  EXPECT_NEAR(t.bound, 0.3, 1e-15);
  EXPECT_LT(max_uncertainty_closed_form({0.6, 0.0}, {1e-3, 3e-4}).delta, 0.3);
}

TEST(Theorem1, PropertyHolds) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 2000; ++trial) {
    auto d = random_draw(rng);
    if (trial % 4 == 0) d.fpr.half_width = d.fpr.value * d.tpr.cv();  // equal CVs
    const double delta = max_uncertainty_closed_form(d.tpr, d.fpr).delta;
    const auto t = theorem1_bound(d.tpr, d.fpr);
    EXPECT_LE(delta, t.bound + 1e-12);
    EXPECT_EQ(std::abs(delta - t.bound) <= 1e-12, std::abs(d.tpr.cv() - d.fpr.cv()) <= 1e-12) << trial;
  }
}

TEST(Theorem1, DeltaDecreasesWithEitherCv) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> shrink(0.1, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = random_draw(rng);
    const double base = max_uncertainty_closed_form(d.tpr, d.fpr).delta;
    if (d.tpr.half_width > 0.0) {
      const RateEstimate tighter(d.tpr.value, d.tpr.half_width * shrink(rng));
      EXPECT_LT(max_uncertainty_closed_form(tighter, d.fpr).delta, base);
    }
    if (d.fpr.half_width > 0.0) {
      const RateEstimate tighter(d.fpr.value, d.fpr.half_width * shrink(rng));
      EXPECT_LT(max_uncertainty_closed_form(d.tpr, tighter).delta, base);
    }
  }
}

TEST(PrecisionBand, NarrowerIntervalsNest) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto wide = random_draw(rng);
    const RateEstimate t(wide.tpr.value, wide.tpr.half_width * unit(rng));
    const RateEstimate f(wide.fpr.value, wide.fpr.half_width * unit(rng));
    const Prevalence eta(std::pow(10.0, -6.0 * unit(rng)) * 0.99);
    const auto outer = precision_band(wide.tpr, wide.fpr, eta);
    const auto inner = precision_band(t, f, eta);
    EXPECT_LE(outer.lower, inner.lower + 1e-15);
    EXPECT_GE(outer.upper, inner.upper - 1e-15);
    EXPECT_LE(inner.lower, inner.point);
    EXPECT_LE(inner.point, inner.upper);
  }
}

TEST(CorollaryInterval, ConfidenceAndWidth) {
  const RateEstimate tpr(0.6, 0.06, 0.95), fpr(1e-3, 1e-4, 0.95);
  const auto ci = corollary_interval(tpr, fpr, Prevalence(1e-2));
  EXPECT_NEAR(ci.confidence, 0.9025, 1e-15);
  const double point = precision_hp(HighPrecision("0.6"), HighPrecision("0.001"), HighPrecision("0.01"))
                           .convert_to<double>();
  EXPECT_NEAR(ci.point, point, 1e-15);
  EXPECT_NEAR(ci.lower, point - 0.1, 1e-15);
  EXPECT_NEAR(ci.upper, point + 0.1, 1e-15);
  EXPECT_THROW(corollary_interval(tpr, RateEstimate(1e-3, 1e-4, 0.9), Prevalence(1e-2)), std::invalid_argument);
  // Clamped at 1.
  const auto top = corollary_interval(tpr, fpr, Prevalence(0.5));
  EXPECT_EQ(top.upper, 1.0);
  // CV >= 1 cannot reach the corollary.
  EXPECT_THROW(corollary_interval({0.6, 0.6}, fpr, Prevalence(0.5)), NumericError);
}

TEST(CompanionCv, Values) {
  EXPECT_NEAR(solve_companion_cv(0.1, 0.1), 0.1, 1e-15);
  const double oracle = testing::companion_cv_hp(HighPrecision("0.05"), HighPrecision("0.1")).convert_to<double>();
  EXPECT_NEAR(oracle, 0.1495, 1e-15);
  EXPECT_NEAR(solve_companion_cv(0.05, 0.1), oracle, 1e-14);
  try {
    solve_companion_cv(0.2, 0.1);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_STREQ(e.what(), "target Delta unattainable");
  }
  EXPECT_EQ(solve_companion_cv(0.0, 0.1) > 0.1, true);
}

TEST(CompanionCv, RoundTripAndSymmetry) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double delta = 0.001 + 0.9 * unit(rng);
    const double c1 = delta * unit(rng);
    const double c2 = solve_companion_cv(c1, delta);
    EXPECT_NEAR(c2, testing::companion_cv_hp(c1, delta).convert_to<double>(), 1e-12);
    const RateEstimate t1(0.6, 0.6 * c1), f2(1e-3, 1e-3 * c2);
    const RateEstimate t2(0.6, 0.6 * c2), f1(1e-3, 1e-3 * c1);
    EXPECT_NEAR(max_uncertainty_closed_form(t1, f2).delta, delta, 1e-9);
    EXPECT_NEAR(max_uncertainty_closed_form(t2, f1).delta, delta, 1e-9);
    EXPECT_EQ(max_uncertainty_from_cvs(c1, c2), max_uncertainty_from_cvs(c2, c1));
  }
}

std::vector<PredictionRecord> scored(std::size_t pos_hits, std::size_t pos, std::size_t neg_hits, std::size_t neg) {
  std::vector<PredictionRecord> r;
  for (std::size_t i = 0; i < pos; ++i) r.push_back({i < pos_hits ? 1.0 : 0.0, P});
  for (std::size_t i = 0; i < neg; ++i) r.push_back({i < neg_hits ? 1.0 : 0.0, N});
  return r;
}

TEST(Bootstrap, NoVarianceWhenClassIsUniform) {
  const auto r = scored(40, 40, 0, 100);
  const auto tpr = bootstrap_rate_estimate(r, 0.5, RateKind::tpr, 200, 0.95, 1);
  EXPECT_EQ(tpr.value, 1.0);
  EXPECT_EQ(tpr.half_width, 0.0);
  const auto fpr = bootstrap_rate_estimate(r, 0.5, RateKind::fpr, 200, 0.95, 1);
  EXPECT_EQ(fpr.value, 0.0);
  EXPECT_EQ(fpr.half_width, 0.0);
}

TEST(Bootstrap, HalfWidthTracksBinomialApproximation) {
  // z_{0.975} sqrt(r (1 - r) / n) for r = 0.3, n = 400.
  const double r = 0.3, n = 400.0;
  const double normal = 1.959963984540054 * std::sqrt(r * (1 - r) / n);
  const auto records = scored(120, 400, 0, 10);
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto est = bootstrap_rate_estimate(records, 0.5, RateKind::tpr, 400, 0.95, seed);
    EXPECT_EQ(est.value, 0.3);
    EXPECT_GT(est.half_width, normal / 3.0);
    EXPECT_LT(est.half_width, normal * 3.0);
    mean += est.half_width / 20.0;
  }
  EXPECT_NEAR(mean, normal, 0.15 * normal);
}

TEST(Bootstrap, DeterministicAcrossRunsAndThreads) {
  const auto records = scored(33, 97, 12, 1000);
  const auto a = bootstrap_rate_estimate(records, 0.5, RateKind::fpr, 500, 0.9, 99, 1);
  const auto b = bootstrap_rate_estimate(records, 0.5, RateKind::fpr, 500, 0.9, 99, 1);
  const auto c = bootstrap_rate_estimate(records, 0.5, RateKind::fpr, 500, 0.9, 99, 7);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Bootstrap, Errors) {
  const auto only_pos = scored(3, 10, 0, 0);
  EXPECT_THROW(bootstrap_rate_estimate(only_pos, 0.5, RateKind::fpr, 100, 0.95, 0), DataError);
  EXPECT_THROW(bootstrap_rate_estimate(only_pos, 0.5, RateKind::tpr, 99, 0.95, 0), std::invalid_argument);
}

TEST(Hoeffding, SampleSizes) {
  EXPECT_EQ(hoeffding_sample_size(0.01, 0.95), 18445u);
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> sigma(1e-4, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = sigma(rng);
    const auto n = hoeffding_sample_size(s, 0.95);
    const auto n_half = hoeffding_sample_size(s / 2.0, 0.95);
    EXPECT_LE(static_cast<double>(n_half), 4.0 * static_cast<double>(n));
    EXPECT_GE(static_cast<double>(n_half), 4.0 * static_cast<double>(n) - 3.0);
    // Smallest n meeting the bound.
    EXPECT_LE(2.0 * std::exp(-2.0 * n * s * s), 0.05 * (1 + 1e-12));
    if (n > 1) {
      EXPECT_GT(2.0 * std::exp(-2.0 * (n - 1) * s * s), 0.05 * (1 - 1e-12));
    }
  }
  EXPECT_LT(hoeffding_sample_size(0.01, 0.9), hoeffding_sample_size(0.01, 0.95));
  EXPECT_LT(hoeffding_sample_size(0.01, 0.95), hoeffding_sample_size(0.01, 0.99));
  EXPECT_THROW(hoeffding_sample_size(0.0, 0.95), std::invalid_argument);
}

}  // namespace
}  // namespace imbeval
