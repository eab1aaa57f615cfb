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

/// @file curves.hpp
/// ROC construction, prevalence-adjusted PR curves, precision / F1 /
/// PR-AUC as functions of prevalence, and detection of prevalences at
/// which two classifiers swap rank.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "imbeval/core_metrics.hpp"
#include "imbeval/error.hpp"
#include "imbeval/parallel.hpp"

namespace imbeval {

/// Empirical or analytic ROC curve, ordered by decreasing threshold, so
/// both fpr and tpr are non-decreasing. Always starts at (0,0) and ends at
/// (1,1). `positives`/`negatives` are the class sizes it was built from
/// (zero for analytic curves).
struct RocCurve {
  std::vector<OperatingPoint> points;
  std::vector<double> thresholds;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
};

inline void validate(const RocCurve& roc) {
  if (roc.points.size() < 2 || roc.points.size() != roc.thresholds.size()) {
    throw std::invalid_argument("ROC curve needs at least two points with matching thresholds");
  }
  const auto& first = roc.points.front();
  const auto& last = roc.points.back();
  if (first.tpr != 0.0 || first.fpr != 0.0 || last.tpr != 1.0 || last.fpr != 1.0) {
    throw std::invalid_argument("ROC curve must run from (0,0) to (1,1)");
  }
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    check_operating_point(roc.points[i]);
    if (roc.points[i].tpr < roc.points[i - 1].tpr || roc.points[i].fpr < roc.points[i - 1].fpr) {
      throw std::invalid_argument("ROC curve must be non-decreasing in both rates");
    }
  }
}

enum class Axis { prevalence, recall, precision, f1, pr_auc, fpr, tpr };
enum class Scale { linear, log10 };

constexpr std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::prevalence: return "prevalence";
    case Axis::recall: return "recall";
    case Axis::precision: return "precision";
    case Axis::f1: return "f1";
    case Axis::pr_auc: return "pr_auc";
    case Axis::fpr: return "fpr";
    case Axis::tpr: return "tpr";
  }
  return "";
}

inline std::optional<Axis> axis_from_name(std::string_view name) {
  for (Axis a : {Axis::prevalence, Axis::recall, Axis::precision, Axis::f1, Axis::pr_auc,
                 Axis::fpr, Axis::tpr}) {
    if (axis_name(a) == name) return a;
  }
  return std::nullopt;
}

/// Series of (x, y) points with axis semantics. Prevalence-axis curves have
/// strictly increasing x; recall/fpr-axis curves (PR, ROC) only
/// non-decreasing x since a threshold step can leave recall unchanged.
struct Curve {
  std::vector<double> x;
  std::vector<double> y;
  Axis x_axis = Axis::prevalence;
  Axis y_axis = Axis::precision;
  Scale x_scale = Scale::linear;
  std::optional<double> eta;   // prevalence the curve was computed at
  std::size_t dropped = 0;     // points skipped because precision was 0/0
};

inline void validate(const Curve& c) {
  if (c.x.size() != c.y.size()) throw std::invalid_argument("curve x and y lengths differ");
  const bool strict = c.x_axis == Axis::prevalence;
  for (std::size_t i = 1; i < c.x.size(); ++i) {
    if (strict ? !(c.x[i] > c.x[i - 1]) : !(c.x[i] >= c.x[i - 1])) {
      throw std::invalid_argument(strict ? "curve x must be strictly increasing"
                                         : "curve x must be non-decreasing");
    }
  }
}

/// Strictly increasing prevalences inside (0, 1).
class PrevalenceGrid {
 public:
  explicit PrevalenceGrid(std::vector<double> etas) : etas_(std::move(etas)) {
    if (etas_.empty()) throw std::invalid_argument("prevalence grid is empty");
    for (std::size_t i = 0; i < etas_.size(); ++i) {
      if (!(etas_[i] > 0.0 && etas_[i] < 1.0)) {
        throw std::invalid_argument("prevalence grid values must lie in (0, 1)");
      }
      if (i > 0 && !(etas_[i] > etas_[i - 1])) {
        throw std::invalid_argument("prevalence grid must be strictly increasing");
      }
    }
  }

  /// `points` values log-spaced over [lo, hi].
  static PrevalenceGrid log_spaced(double lo, double hi, std::size_t points) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo) || !(hi < 1.0)) {
      throw std::invalid_argument("log grid needs 0 < lo < hi < 1 and at least 2 points");
    }
    std::vector<double> etas(points);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i) {
      etas[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    etas.front() = lo;
    etas.back() = hi;
    return PrevalenceGrid(std::move(etas));
  }

  /// 200 log-spaced points over [1e-6, 0.5], plus the dataset's own p+.
  static PrevalenceGrid default_grid(std::optional<double> p_plus = std::nullopt) {
    auto grid = log_spaced(1e-6, 0.5, 200);
    return p_plus ? grid.with(*p_plus) : grid;
  }

  /// Copy with `eta` inserted (no-op if already present).
  PrevalenceGrid with(double eta) const {
    std::vector<double> etas = etas_;
    auto it = std::lower_bound(etas.begin(), etas.end(), eta);
    if (it == etas.end() || *it != eta) etas.insert(it, eta);
    return PrevalenceGrid(std::move(etas));
  }

  const std::vector<double>& etas() const { return etas_; }
  std::size_t size() const { return etas_.size(); }

 private:
  std::vector<double> etas_;
};

/// Empirical ROC from scored records: one point per distinct score (used as
/// a `score >= t` threshold) plus (0,0) at t = +inf. Tied scores change
/// class together.
inline RocCurve roc_from_predictions(std::span<const PredictionRecord> records) {
  std::vector<PredictionRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const PredictionRecord& a, const PredictionRecord& b) { return a.score > b.score; });
  std::uint64_t pos = 0;
  for (const auto& r : sorted) {
    if (!std::isfinite(r.score)) throw DataError("scores must be finite");
    pos += r.label == Label::positive;
  }
  const std::uint64_t neg = sorted.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("ROC needs at least one positive and one negative record");

  RocCurve roc;
  roc.positives = pos;
  roc.negatives = neg;
  roc.points.push_back({0.0, 0.0});
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double s = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == s; ++i) {
      sorted[i].label == Label::positive ? ++tp : ++fp;
    }
    roc.points.push_back({static_cast<double>(tp) / static_cast<double>(pos),
                          static_cast<double>(fp) / static_cast<double>(neg)});
    roc.thresholds.push_back(s);
  }
  return roc;
}

inline Curve roc_as_curve(const RocCurve& roc) {
  Curve c;
  c.x_axis = Axis::fpr;
  c.y_axis = Axis::tpr;
  for (const auto& p : roc.points) {
    c.x.push_back(p.fpr);
    c.y.push_back(p.tpr);
  }
  return c;
}

/// Index of the first (highest-threshold) ROC point with tpr >= target.
inline std::size_t index_at_recall(const RocCurve& roc, double target_recall) {
  if (!(target_recall >= 0.0 && target_recall <= 1.0)) {
    throw std::invalid_argument("target recall must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < roc.points.size(); ++i) {
    if (roc.points[i].tpr >= target_recall) return i;
  }
  return roc.points.size() - 1;
}

inline OperatingPoint operating_point_at_recall(const RocCurve& roc, double target_recall) {
  return roc.points[index_at_recall(roc, target_recall)];
}

/// PR curve of `roc` at prevalence eta. The (0,0) point has undefined
/// precision and is dropped; the drop count is stored in the curve.
inline Curve pr_curve(const RocCurve& roc, const Prevalence& eta) {
  require_interior(eta);
  Curve c;
  c.x_axis = Axis::recall;
  c.y_axis = Axis::precision;
  c.eta = eta.value();
  c.x.reserve(roc.points.size());
  c.y.reserve(roc.points.size());
  for (const auto& p : roc.points) {
    if (p.tpr == 0.0 && p.fpr == 0.0) {
      ++c.dropped;
      continue;
    }
    c.x.push_back(p.tpr);
    c.y.push_back(adjusted_precision(p, eta));
  }
  return c;
}

/// Area under a PR curve: the first point's precision is held over
/// [0, r_first], then trapezoids join consecutive points.
inline double pr_auc_of(const Curve& pr) {
  if (pr.x.size() < 2) throw DataError("PR-AUC needs at least two PR points");
  double area = pr.x.front() * pr.y.front();
  for (std::size_t i = 1; i < pr.x.size(); ++i) {
    area += (pr.x[i] - pr.x[i - 1]) * 0.5 * (pr.y[i] + pr.y[i - 1]);
  }
  return std::clamp(area, 0.0, 1.0);
}

inline double pr_auc(const RocCurve& roc, const Prevalence& eta) {
  return pr_auc_of(pr_curve(roc, eta));
}

namespace detail {

template <typename Fn>
Curve prevalence_curve(const PrevalenceGrid& grid, Axis y_axis, unsigned threads, Fn&& metric) {
  Curve c;
  c.x = grid.etas();
  c.y.resize(grid.size());
  c.x_axis = Axis::prevalence;
  c.y_axis = y_axis;
  c.x_scale = Scale::log10;
  parallel_for(grid.size(), threads, [&](std::size_t i) { c.y[i] = metric(Prevalence(c.x[i])); });
  return c;
}

}  // namespace detail

/// Positive-prevalence precision curve of one operating point.
inline Curve p3_curve(const OperatingPoint& op, const PrevalenceGrid& grid) {
  return detail::prevalence_curve(grid, Axis::precision, 1,
                                  [&](const Prevalence& eta) { return adjusted_precision(op, eta); });
}

inline Curve f1_curve(const OperatingPoint& op, const PrevalenceGrid& grid) {
  return detail::prevalence_curve(grid, Axis::f1, 1,
                                  [&](const Prevalence& eta) { return adjusted_f1(op, eta); });
}

inline Curve pr_auc_curve(const RocCurve& roc, const PrevalenceGrid& grid, unsigned threads = 1) {
  return detail::prevalence_curve(grid, Axis::pr_auc, threads,
                                  [&](const Prevalence& eta) { return pr_auc(roc, eta); });
}

/// Smallest prevalence at which metric_a(eta) - metric_b(eta) changes sign.
/// Sign changes are located between grid points (zeros are skipped) and
/// refined by bisection in log(eta) to relative width 1e-6.
inline std::optional<double> find_sign_change(const std::function<double(double)>& difference,
                                              const PrevalenceGrid& grid) {
  const auto& etas = grid.etas();
  std::optional<std::size_t> last;
  double last_value = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double d = difference(etas[i]);
    if (d == 0.0) continue;
    if (last && (d > 0.0) != (last_value > 0.0)) {
      double lo = etas[*last];
      double hi = etas[i];
      double lo_value = last_value;
      while (hi - lo > 1e-6 * lo) {
        const double mid = std::sqrt(lo * hi);
        const double dm = difference(mid);
        if (dm == 0.0) return mid;
        if ((dm > 0.0) == (lo_value > 0.0)) {
          lo = mid;
          lo_value = dm;
        } else {
          hi = mid;
        }
      }
      return std::sqrt(lo * hi);
    }
    last = i;
    last_value = d;
  }
  return std::nullopt;
}

enum class FlipMetric { pr_auc, f1_at_op };

/// F1 flip between two fixed operating points.
inline std::optional<double> find_ordering_flip(const OperatingPoint& a, const OperatingPoint& b,
                                                const PrevalenceGrid& grid) {
  return find_sign_change(
      [&](double eta) { return adjusted_f1(a, Prevalence(eta)) - adjusted_f1(b, Prevalence(eta)); }, grid);
}

struct FlipOptions {
  FlipMetric metric = FlipMetric::pr_auc;
  // f1_at_op: each classifier is evaluated at its first ROC point reaching
  // this recall.
  double recall_a = 0.5;
  double recall_b = 0.5;
};

inline std::optional<double> find_ordering_flip(const RocCurve& a, const RocCurve& b,
                                                const PrevalenceGrid& grid,
                                                const FlipOptions& options = {}) {
  if (options.metric == FlipMetric::f1_at_op) {
    return find_ordering_flip(operating_point_at_recall(a, options.recall_a),
                              operating_point_at_recall(b, options.recall_b), grid);
  }
  return find_sign_change(
      [&](double eta) { return pr_auc(a, Prevalence(eta)) - pr_auc(b, Prevalence(eta)); }, grid);
}

/// Binormal score model: negatives ~ N(0, 1), positives ~ N(mean, std).
struct BinormalParams {
  double mean = 1.0;
  double std = 1.0;

  friend bool operator==(const BinormalParams&, const BinormalParams&) = default;
};

/// Analytic binormal ROC sampled at `thresholds` evenly spaced scores that
/// cover both class densities out to 9 standard deviations.
inline RocCurve binormal_roc(const BinormalParams& p, std::size_t thresholds = 2001) {
  if (!(p.std > 0.0) || !std::isfinite(p.mean) || thresholds < 2) {
    throw std::invalid_argument("binormal ROC needs std > 0, finite mean and >= 2 thresholds");
  }
  const double hi = std::max(9.0, p.mean + 9.0 * p.std);
  const double lo = std::min(-9.0, p.mean - 9.0 * p.std);
  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < thresholds; ++i) {
    const double t = hi - (hi - lo) * static_cast<double>(i) / static_cast<double>(thresholds - 1);
    const double fpr = 0.5 * std::erfc(t / std::sqrt(2.0));
    const double tpr = 0.5 * std::erfc((t - p.mean) / (p.std * std::sqrt(2.0)));
    roc.points.push_back({tpr, fpr});
    roc.thresholds.push_back(t);
  }
  roc.points.push_back({1.0, 1.0});
  roc.thresholds.push_back(-std::numeric_limits<double>::infinity());
  return roc;
}

struct FlipSearchResult {
  FlipMetric metric;
  BinormalParams a;
  BinormalParams b;
  RocCurve roc_a;
  RocCurve roc_b;
  double recall_a = 0.0;  // f1_at_op only
  double recall_b = 0.0;
  OperatingPoint op_a;    // f1_at_op only
  OperatingPoint op_b;
  double eta_star = 0.0;
};

/// Grid search over a fixed family of binormal classifiers for a pair whose
/// `metric` ranking flips at some eta* inside (eta_lo, eta_hi). Candidates
/// are visited in a fixed order, so the result is deterministic.
inline std::optional<FlipSearchResult> search_binormal_flip(FlipMetric metric, const PrevalenceGrid& grid,
                                                            double eta_lo, double eta_hi,
                                                            unsigned threads = 1) {
  std::vector<BinormalParams> family;
  for (double mean : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    for (double sd : {0.25, 0.5, 1.0, 2.0, 3.0}) family.push_back({mean, sd});
  }
  std::vector<RocCurve> rocs(family.size());
  parallel_for(family.size(), threads, [&](std::size_t i) { rocs[i] = binormal_roc(family[i]); });

  auto in_window = [&](std::optional<double> eta) { return eta && *eta > eta_lo && *eta < eta_hi; };

  if (metric == FlipMetric::pr_auc) {
    std::vector<Curve> auc(family.size());
    parallel_for(family.size(), threads, [&](std::size_t i) { auc[i] = pr_auc_curve(rocs[i], grid); });
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        // Cheap screen on the precomputed curves before refining.
        bool above = false;
        bool below = false;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const double eta = grid.etas()[k];
          if (eta <= eta_lo || eta >= eta_hi) continue;
          above |= auc[i].y[k] > auc[j].y[k];
          below |= auc[i].y[k] < auc[j].y[k];
        }
        if (!(above && below)) continue;
        const auto eta = find_ordering_flip(rocs[i], rocs[j], grid);
        if (in_window(eta)) {
          return FlipSearchResult{metric, family[i], family[j], rocs[i], rocs[j], 0.0, 0.0, {}, {}, *eta};
        }
      }
    }
    return std::nullopt;
  }

  const double recalls[] = {0.3, 0.5, 0.7, 0.9};
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      for (double ra : recalls) {
        for (double rb : recalls) {
          const auto op_a = operating_point_at_recall(rocs[i], ra);
          const auto op_b = operating_point_at_recall(rocs[j], rb);
          if (op_a.fpr == 0.0 || op_b.fpr == 0.0) continue;
          const auto eta = find_ordering_flip(op_a, op_b, grid);
          if (in_window(eta)) {
            return FlipSearchResult{metric, family[i], family[j], rocs[i], rocs[j], ra, rb, op_a, op_b, *eta};
          }
        }
      }
    }
  }
  return std::nullopt;
}

/// Last-value-carried sampling of a non-decreasing-x curve onto `grid`:
/// each grid value takes the y of the last point with x <= g, or the first
/// point's y when g precedes the curve.
inline std::vector<double> step_sample(const Curve& c, std::span<const double> grid) {
  if (c.x.empty()) throw std::invalid_argument("cannot sample an empty curve");
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(c.x.begin(), c.x.end(), grid[i]);
    const auto idx = it == c.x.begin() ? 0 : static_cast<std::size_t>(it - c.x.begin()) - 1;
    out[i] = c.y[idx];
  }
  return out;
}

}  // namespace imbeval
