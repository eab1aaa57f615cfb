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

// Independent reference computations and random generators for tests.
// Nothing here calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "imbeval/core_metrics.hpp"
#include "imbeval/curves.hpp"

namespace imbeval::testing {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// Bayes-rule precision in 50-digit arithmetic.
inline HighPrecision precision_hp(HighPrecision tpr, HighPrecision fpr, HighPrecision eta) {
  return tpr * eta / (tpr * eta + fpr * (1 - eta));
}

/// Root of ((1-c1)/(1+c1)) ((1-c2)/(1+c2)) = ((1-d)/(1+d))^2 in c2 by
/// 50-digit bisection on [0, 1]; the left side decreases in c2.
inline HighPrecision companion_cv_hp(HighPrecision c1, HighPrecision d) {
  const HighPrecision k = ((1 - d) / (1 + d)) * ((1 - d) / (1 + d));
  auto g = [&](const HighPrecision& c2) { return (1 - c1) / (1 + c1) * (1 - c2) / (1 + c2) - k; };
  HighPrecision lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const HighPrecision mid = (lo + hi) / 2;
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

/// PR points straight from confusion counts: one (TP/P, TP/(TP+FP)) pair
/// per distinct threshold with at least one predicted positive.
inline std::vector<std::pair<double, double>> classic_pr_points(const std::vector<PredictionRecord>& records) {
  std::vector<double> scores;
  for (const auto& r : records) scores.push_back(r.score);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::uint64_t pos = 0;
  for (const auto& r : records) pos += r.label == Label::positive;
  std::vector<std::pair<double, double>> out;
  for (double t : scores) {
    std::uint64_t tp = 0, fp = 0;
    for (const auto& r : records) {
      if (r.score >= t) (r.label == Label::positive ? tp : fp)++;
    }
    out.emplace_back(static_cast<double>(tp) / static_cast<double>(pos),
                     static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  return out;
}

/// Midpoint-rule integral of a piecewise-linear PR curve over recall in
/// [0, 1] with `samples` nodes. Left of the first point precision is held
/// at the first value; across a vertical run the last point of the run
/// starts the next segment.
inline double dense_pr_auc(const std::vector<double>& recall, const std::vector<double>& precision,
                           std::size_t samples = 1'000'000) {
  double sum = 0.0;
  std::size_t seg = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double r = (static_cast<double>(s) + 0.5) / static_cast<double>(samples);
    if (r <= recall.front()) {
      sum += precision.front();
      continue;
    }
    while (seg + 1 < recall.size() && recall[seg + 1] < r) ++seg;
    if (seg + 1 >= recall.size()) {
      sum += precision.back();
      continue;
    }
    // Segment (seg, seg+1) with recall[seg] < r <= recall[seg+1].
    const double w = (r - recall[seg]) / (recall[seg + 1] - recall[seg]);
    sum += precision[seg] + w * (precision[seg + 1] - precision[seg]);
  }
  return sum / static_cast<double>(samples);
}

/// Random labeled scores; scores drawn from a small integer set so ties occur.
inline std::vector<PredictionRecord> random_records(std::mt19937_64& rng, std::size_t n_pos, std::size_t n_neg,
                                                    int distinct_scores = 50) {
  std::uniform_int_distribution<int> score(0, distinct_scores - 1);
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < n_pos; ++i) out.push_back({score(rng) / 10.0 + 1.0, Label::positive});
  for (std::size_t i = 0; i < n_neg; ++i) out.push_back({score(rng) / 10.0, Label::negative});
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// Step-interpolated tpr of an empirical ROC at `fpr`: highest tpr among
/// points with point.fpr <= fpr.
inline double roc_step_tpr(const RocCurve& roc, double fpr) {
  double best = 0.0;
  for (const auto& p : roc.points) {
    if (p.fpr <= fpr) best = std::max(best, p.tpr);
  }
  return best;
}

}  // namespace imbeval::testing
