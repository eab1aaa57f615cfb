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

#pragma once

/// @file uncertainty.hpp
/// How confidence intervals on TPR and FPR propagate into precision.
///
/// Intervals are hard boxes: precision over the box is extremal at two
/// corners because it decreases monotonically in fpr / tpr, so
///   UB(eta) = Prec(eta, tpr + s_t, fpr - s_f)
///   LB(eta) = Prec(eta, tpr - s_t, fpr + s_f).
/// The widest gap over eta (Delta) has a closed form in the corner ratios
///   r1 = (fpr - s_f) / (tpr + s_t),  r2 = (fpr + s_f) / (tpr - s_t),
/// reached at eta* = sqrt(r1 r2) / (1 + sqrt(r1 r2)), and it never exceeds
/// the larger of the two coefficients of variation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "imbeval/core_metrics.hpp"
#include "imbeval/error.hpp"
#include "imbeval/parallel.hpp"

namespace imbeval {

/// Rate point estimate with a symmetric confidence half-width at level
/// `confidence`. Construction accepts any value in [0, 1]; operations that
/// need half_width < value check it themselves.
struct RateEstimate {
  double value = 0.0;
  double half_width = 0.0;
  double confidence = 0.95;

  RateEstimate() = default;
  RateEstimate(double value_, double half_width_, double confidence_ = 0.95)
      : value(value_), half_width(half_width_), confidence(confidence_) {
    if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("rate must lie in [0, 1]");
    if (!(half_width >= 0.0) || !std::isfinite(half_width)) {
      throw std::invalid_argument("half-width must be finite and non-negative");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
      throw std::invalid_argument("confidence must lie in (0, 1)");
    }
  }

  /// Coefficient of variation half_width / value (infinite when value = 0).
  double cv() const { return value > 0.0 ? half_width / value : std::numeric_limits<double>::infinity(); }

  /// value > 0 and half_width < value.
  bool strictly_bounded() const { return value > 0.0 && half_width < value; }

  friend bool operator==(const RateEstimate&, const RateEstimate&) = default;
};

struct PrecisionBand {
  double eta = 0.0;
  double lower = 0.0;
  double point = 0.0;
  double upper = 0.0;
  // fpr - s_f == 0: the upper corner has no false positives, so UB is 1.
  bool degenerate_upper = false;
};

inline PrecisionBand precision_band(const RateEstimate& tpr, const RateEstimate& fpr, const Prevalence& eta) {
  require_interior(eta);
  const double fpr_low = fpr.value - fpr.half_width;
  if (fpr_low < 0.0) {
    throw NumericError("band unbounded above at small eta is not representable; tighten sigma_FPR");
  }
  const double tpr_low = std::max(0.0, tpr.value - tpr.half_width);
  const double tpr_high = tpr.value + tpr.half_width;
  const double fpr_high = fpr.value + fpr.half_width;
  const double e = eta.value();
  auto prec = [e](double t, double f) {
    const double den = t * e + f * (1.0 - e);
    return den == 0.0 ? 0.0 : t * e / den;
  };

  PrecisionBand band;
  band.eta = e;
  band.degenerate_upper = fpr_low == 0.0;
  band.upper = band.degenerate_upper ? 1.0 : prec(tpr_high, fpr_low);
  band.lower = prec(tpr_low, fpr_high);
  band.point = adjusted_precision({tpr.value, fpr.value}, eta);
  return band;
}

struct DeltaResult {
  double delta = 0.0;
  double eta_star = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

namespace detail {

inline void require_theorem_hypotheses(const RateEstimate& tpr, const RateEstimate& fpr) {
  if (!tpr.strictly_bounded() || !fpr.strictly_bounded()) {
    throw NumericError("Theorem 1 inapplicable: sigma >= point estimate");
  }
}

}  // namespace detail

/// Delta depends on the two CVs only:
///   q^2 = r1/r2 = (1-a)/(1+a) * (1-b)/(1+b),   Delta = (1 - q) / (1 + q).
/// Symmetric in (a, b) bit for bit.
inline double max_uncertainty_from_cvs(double cv_a, double cv_b) {
  if (!(cv_a >= 0.0 && cv_a < 1.0) || !(cv_b >= 0.0 && cv_b < 1.0)) {
    throw NumericError("Theorem 1 inapplicable: sigma >= point estimate");
  }
  // 1 - q^2 expanded to avoid cancellation when both CVs are small.
  const double num = 2.0 * (cv_a + cv_b);
  const double den = (1.0 + cv_a) * (1.0 + cv_b);
  const double one_minus_q2 = num / den;
  const double q = std::sqrt(((1.0 - cv_a) * (1.0 - cv_b)) / den);
  return one_minus_q2 / ((1.0 + q) * (1.0 + q));
}

inline DeltaResult max_uncertainty_closed_form(const RateEstimate& tpr, const RateEstimate& fpr) {
  detail::require_theorem_hypotheses(tpr, fpr);
  const double t = tpr.value, st = tpr.half_width;
  const double f = fpr.value, sf = fpr.half_width;
  DeltaResult out;
  out.r1 = (f - sf) / (t + st);
  out.r2 = (f + sf) / (t - st);
  // 1 - r1/r2 = (r2 - r1)/r2 with r2 - r1 = 2 (f st + t sf) / (t^2 - st^2).
  const double gap = 2.0 * (f * st + t * sf) / ((t - st) * (t + st));
  const double one_minus_ratio = gap / out.r2;
  const double q = std::sqrt(out.r1 / out.r2);
  out.delta = one_minus_ratio / ((1.0 + q) * (1.0 + q));
  const double s = std::sqrt(out.r1 * out.r2);
  out.eta_star = s / (1.0 + s);
  return out;
}

struct NumericDelta {
  double delta = 0.0;
  double eta_star = 0.0;
};

/// Delta by direct maximization of UB(eta) - LB(eta): a 1000-point log
/// grid over (1e-9, 1 - 1e-9) brackets the peak, golden-section search in
/// log(eta) refines it. Independent of the closed form.
inline NumericDelta max_uncertainty_numeric(const RateEstimate& tpr, const RateEstimate& fpr) {
  detail::require_theorem_hypotheses(tpr, fpr);
  auto width = [&](double log_eta) {
    const auto band = precision_band(tpr, fpr, Prevalence(std::exp(log_eta)));
    return band.upper - band.lower;
  };
  constexpr int kGrid = 1000;
  const double a = std::log(1e-9);
  const double b = std::log(1.0 - 1e-9);
  auto node = [&](int i) { return a + (b - a) * i / (kGrid - 1); };
  int best = 0;
  double best_width = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double w = width(node(i));
    if (w > best_width) {
      best_width = w;
      best = i;
    }
  }
  double lo = node(std::max(best - 1, 0));
  double hi = node(std::min(best + 1, kGrid - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = width(x1);
  double f2 = width(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = width(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = width(x1);
    }
  }
  NumericDelta out{best_width, std::exp(node(best))};
  for (double x : {x1, x2, 0.5 * (lo + hi)}) {
    const double w = width(x);
    if (w > out.delta) out = {w, std::exp(x)};
  }
  return out;
}

struct Theorem1Bound {
  double bound = 0.0;
  bool tight = false;
};

/// Delta <= max(CV_TPR, CV_FPR), with equality iff the CVs are equal.
inline Theorem1Bound theorem1_bound(const RateEstimate& tpr, const RateEstimate& fpr) {
  detail::require_theorem_hypotheses(tpr, fpr);
  const double a = tpr.cv();
  const double b = fpr.cv();
  return {std::max(a, b), std::abs(a - b) <= 1e-12};
}

struct PrecisionInterval {
  double lower = 0.0;
  double point = 0.0;
  double upper = 0.0;
  double delta = 0.0;
  double confidence = 0.0;
};

/// point +- max(CV_TPR, CV_FPR), clamped to [0, 1]. Holds with confidence
/// alpha^2 when both rate intervals are independent alpha-intervals.
inline PrecisionInterval corollary_interval(const RateEstimate& tpr, const RateEstimate& fpr,
                                            const Prevalence& eta) {
  if (tpr.confidence != fpr.confidence) {
    throw std::invalid_argument("TPR and FPR intervals must share one confidence level");
  }
  const auto bound = theorem1_bound(tpr, fpr);
  PrecisionInterval out;
  out.point = adjusted_precision({tpr.value, fpr.value}, eta);
  out.delta = bound.bound;
  out.lower = std::max(0.0, out.point - bound.bound);
  out.upper = std::min(1.0, out.point + bound.bound);
  out.confidence = tpr.confidence * fpr.confidence;
  return out;
}

/// Largest CV of one rate that keeps Delta at `delta` given the other
/// rate's CV. Solves ((1-C1)/(1+C1)) ((1-C2)/(1+C2)) = k, k = ((1-D)/(1+D))^2;
/// symmetric in which rate is known.
inline double solve_companion_cv(double known_cv, double delta) {
  if (!(known_cv >= 0.0 && known_cv < 1.0)) throw std::invalid_argument("known CV must lie in [0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("target Delta must lie in (0, 1)");
  const double k = std::pow((1.0 - delta) / (1.0 + delta), 2);
  if ((1.0 - known_cv) / (1.0 + known_cv) < k) throw NumericError("target Delta unattainable");
  const double c1 = known_cv;
  const double c2 = ((c1 + 1.0) * (1.0 + k) - 2.0) / ((c1 + 1.0) * (1.0 - k) - 2.0);
  return std::clamp(c2, 0.0, 1.0);
}

enum class RateKind { tpr, fpr };

namespace detail {

// Type-7 (linear interpolation) quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

}  // namespace detail

/// Percentile-bootstrap estimate of TPR or FPR at `threshold`: the relevant
/// class is resampled with replacement `replicates` times and half_width is
/// half the length of the central `alpha` interval of replicate rates.
/// Replicate r draws from derive_seed(seed, r), so any thread count gives
/// the same result.
inline RateEstimate bootstrap_rate_estimate(std::span<const PredictionRecord> records, double threshold,
                                            RateKind which, int replicates, double alpha,
                                            std::uint64_t seed, unsigned threads = 1) {
  if (replicates < 100) throw std::invalid_argument("bootstrap needs at least 100 replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const Label cls = which == RateKind::tpr ? Label::positive : Label::negative;
  std::vector<std::uint8_t> hits;
  for (const auto& r : records) {
    if (r.label == cls) hits.push_back(r.score >= threshold ? 1 : 0);
  }
  if (hits.empty()) {
    throw DataError(which == RateKind::tpr ? "bootstrap TPR: no positive records"
                                           : "bootstrap FPR: no negative records");
  }
  const auto n = static_cast<std::uint64_t>(hits.size());
  std::uint64_t total = 0;
  for (auto h : hits) total += h;

  std::vector<double> rates(static_cast<std::size_t>(replicates));
  parallel_for(rates.size(), threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < n; ++i) count += hits[uniform_index(rng, n)];
    rates[r] = static_cast<double>(count) / static_cast<double>(n);
  });
  std::sort(rates.begin(), rates.end());
  const double lo = detail::quantile_sorted(rates, (1.0 - alpha) / 2.0);
  const double hi = detail::quantile_sorted(rates, (1.0 + alpha) / 2.0);
  return RateEstimate(static_cast<double>(total) / static_cast<double>(n), 0.5 * (hi - lo), alpha);
}

/// Samples needed for a two-sided Hoeffding interval of half-width sigma at
/// confidence alpha: smallest n with 2 exp(-2 n sigma^2) <= 1 - alpha.
inline std::uint64_t hoeffding_sample_size(double sigma, double alpha) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double n = std::log(2.0 / (1.0 - alpha)) / (2.0 * sigma * sigma);
  auto count = static_cast<std::uint64_t>(std::ceil(n));
  // ceil() of a value that rounded just above an integer.
  if (count > 0 && 2.0 * std::exp(-2.0 * static_cast<double>(count - 1) * sigma * sigma) <= 1.0 - alpha) {
    --count;
  }
  return std::max<std::uint64_t>(count, 1);
}

}  // namespace imbeval
