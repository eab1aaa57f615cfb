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

/// @file simulation.hpp
/// Synthetic scored datasets and the negative-subsampling study: PR curves
/// from repeated random reductions of the negative class, compared with the
/// single prevalence-adjusted PR curve of the full dataset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "imbeval/core_metrics.hpp"
#include "imbeval/curves.hpp"
#include "imbeval/error.hpp"
#include "imbeval/parallel.hpp"
#include "imbeval/uncertainty.hpp"

namespace imbeval {

struct SyntheticDatasetSpec {
  std::uint64_t n_positive = 5;
  std::uint64_t n_negative = 4995;
  BinormalParams positive{2.0, 1.0};  // negatives are N(0, 1)
  std::uint64_t seed = 0;

  double p_plus() const {
    return static_cast<double>(n_positive) / static_cast<double>(n_positive + n_negative);
  }
};

/// Positives first, then negatives. Each class draws from its own substream.
inline std::vector<PredictionRecord> generate_synthetic(const SyntheticDatasetSpec& spec) {
  if (spec.n_positive == 0 || spec.n_negative == 0) {
    throw std::invalid_argument("synthetic dataset needs both classes");
  }
  if (!(spec.positive.std > 0.0) || !std::isfinite(spec.positive.mean)) {
    throw std::invalid_argument("positive score distribution needs std > 0 and a finite mean");
  }
  std::vector<PredictionRecord> out;
  out.reserve(spec.n_positive + spec.n_negative);
  Rng pos_rng(derive_seed(spec.seed, 0));
  std::normal_distribution<double> pos_dist(spec.positive.mean, spec.positive.std);
  for (std::uint64_t i = 0; i < spec.n_positive; ++i) out.push_back({pos_dist(pos_rng), Label::positive});
  Rng neg_rng(derive_seed(spec.seed, 1));
  std::normal_distribution<double> neg_dist(0.0, 1.0);
  for (std::uint64_t i = 0; i < spec.n_negative; ++i) out.push_back({neg_dist(neg_rng), Label::negative});
  return out;
}

/// Number of negatives to keep next to `positives` so that the subsample's
/// prevalence is `target_eta` (rounded to the nearest integer).
inline std::uint64_t negatives_for_target(std::uint64_t positives, const Prevalence& target_eta) {
  require_interior(target_eta);
  const double eta = target_eta.value();
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(positives) * (1.0 - eta) / eta));
}

/// All positives plus `keep` negatives drawn uniformly without replacement
/// (partial Fisher-Yates driven by `seed`). Record order is preserved.
inline std::vector<PredictionRecord> subsample_negatives(std::span<const PredictionRecord> records,
                                                         std::uint64_t keep, std::uint64_t seed) {
  std::vector<std::size_t> neg_idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].label == Label::negative) neg_idx.push_back(i);
  }
  if (keep > neg_idx.size()) throw std::invalid_argument("cannot keep more negatives than available");
  Rng rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + uniform_index(rng, neg_idx.size() - i);
    std::swap(neg_idx[i], neg_idx[j]);
  }
  std::vector<char> kept(records.size(), 0);
  for (std::size_t i = 0; i < keep; ++i) kept[neg_idx[i]] = 1;
  std::vector<PredictionRecord> out;
  out.reserve(records.size() - neg_idx.size() + keep);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].label == Label::positive || kept[i]) out.push_back(records[i]);
  }
  return out;
}

struct SubsampleStudyResult {
  Prevalence target_eta{0.5};
  Curve adjusted_curve;                 // full data, adjusted to target_eta
  std::vector<double> recall_grid;
  std::vector<double> adjusted_on_grid; // adjusted_curve step-sampled on the grid
  std::vector<double> min, q25, median, q75, max;
  std::vector<std::vector<double>> replicate_precision;  // [replicate][grid point]
  std::uint64_t kept_negatives = 0;
  std::size_t replicate_count = 0;

  double iqr_width(std::size_t i) const { return q75[i] - q25[i]; }
};

/// Repeats negative subsampling to reach `target_eta`. Replicate r uses
/// derive_seed(seed, r); each replicate's PR curve is computed at its own
/// empirical prevalence and step-sampled onto `recall_grid`.
inline SubsampleStudyResult subsample_study(std::span<const PredictionRecord> records,
                                            const Prevalence& target_eta, int replicates,
                                            std::vector<double> recall_grid, std::uint64_t seed,
                                            unsigned threads = 1) {
  if (replicates < 2) throw std::invalid_argument("subsample study needs at least 2 replicates");
  if (recall_grid.empty()) throw std::invalid_argument("recall grid is empty");
  require_interior(target_eta);
  std::uint64_t pos = 0;
  for (const auto& r : records) pos += r.label == Label::positive;
  const std::uint64_t neg = records.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("subsample study needs both classes");
  const double p_plus = static_cast<double>(pos) / static_cast<double>(records.size());
  if (target_eta.value() <= p_plus) throw DataError("cannot reach target by removing negatives");
  const std::uint64_t keep = std::min(negatives_for_target(pos, target_eta), neg);
  if (keep == 0) throw DataError("target prevalence leaves no negatives to keep");

  SubsampleStudyResult out;
  out.target_eta = target_eta;
  out.kept_negatives = keep;
  out.replicate_count = static_cast<std::size_t>(replicates);
  out.adjusted_curve = pr_curve(roc_from_predictions(records), target_eta);
  out.adjusted_on_grid = step_sample(out.adjusted_curve, recall_grid);

  const Prevalence own(static_cast<double>(pos) / static_cast<double>(pos + keep));
  out.replicate_precision.resize(out.replicate_count);
  parallel_for(out.replicate_count, threads, [&](std::size_t r) {
    const auto sub = subsample_negatives(records, keep, derive_seed(seed, r));
    out.replicate_precision[r] = step_sample(pr_curve(roc_from_predictions(sub), own), recall_grid);
  });

  const std::size_t m = recall_grid.size();
  out.min.resize(m);
  out.q25.resize(m);
  out.median.resize(m);
  out.q75.resize(m);
  out.max.resize(m);
  std::vector<double> column(out.replicate_count);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < out.replicate_count; ++r) column[r] = out.replicate_precision[r][i];
    std::sort(column.begin(), column.end());
    out.min[i] = column.front();
    out.q25[i] = detail::quantile_sorted(column, 0.25);
    out.median[i] = detail::quantile_sorted(column, 0.5);
    out.q75[i] = detail::quantile_sorted(column, 0.75);
    out.max[i] = column.back();
  }
  out.recall_grid = std::move(recall_grid);
  return out;
}

/// Evenly spaced recall grid over [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("linear grid needs hi > lo and >= 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

}  // namespace imbeval
