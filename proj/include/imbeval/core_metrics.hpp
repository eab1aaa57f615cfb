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

/// @file core_metrics.hpp
/// Prevalence-parameterized precision and F1, plus the dataset-level
/// estimators (confusion counts, TPR/FPR, prevalence) they are built from.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "imbeval/error.hpp"

namespace imbeval {

enum class Label : std::uint8_t { negative, positive };

/// Maps an integer class code to a Label. Both {-1, +1} and {0, 1} are
/// accepted; mixing them across one dataset is rejected by the readers.
inline Label label_from_int(long code) {
  switch (code) {
    case 1:
      return Label::positive;
    case 0:
    case -1:
      return Label::negative;
    default:
      throw DataError("label must be one of -1, 0, 1 (got " + std::to_string(code) + ")");
  }
}

/// One scored test sample. Higher scores lean positive.
struct PredictionRecord {
  double score = 0.0;
  Label label = Label::negative;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t positives() const { return tp + fn; }
  std::uint64_t negatives() const { return fp + tn; }
  std::uint64_t total() const { return tp + fp + tn + fn; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A (TPR, FPR) pair. Both components live in [0, 1].
struct OperatingPoint {
  double tpr = 0.0;
  double fpr = 0.0;

  friend bool operator==(const OperatingPoint&, const OperatingPoint&) = default;
};

inline void check_operating_point(const OperatingPoint& op) {
  if (!(op.tpr >= 0.0 && op.tpr <= 1.0) || !(op.fpr >= 0.0 && op.fpr <= 1.0)) {
    throw std::invalid_argument("operating point rates must lie in [0, 1]");
  }
}

/// Positive-class prevalence. The closed interval [0, 1] is representable;
/// operations that need the open interval check `is_interior()`.
class Prevalence {
 public:
  explicit Prevalence(double eta) : eta_(eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("prevalence must lie in [0, 1]");
    }
  }

  double value() const { return eta_; }
  bool is_interior() const { return eta_ > 0.0 && eta_ < 1.0; }

  /// Positive-to-negative ratio eta / (1 - eta).
  double imbalance_ratio() const { return eta_ / (1.0 - eta_); }

  static Prevalence from_imbalance_ratio(double ir) {
    if (!(ir >= 0.0) || !std::isfinite(ir)) {
      throw std::invalid_argument("imbalance ratio must be finite and non-negative");
    }
    return Prevalence(ir / (1.0 + ir));
  }

  friend bool operator==(const Prevalence&, const Prevalence&) = default;
  friend auto operator<=>(const Prevalence&, const Prevalence&) = default;

 private:
  double eta_;
};

inline void require_interior(const Prevalence& eta) {
  if (!eta.is_interior()) {
    throw std::invalid_argument("prevalence must lie in the open interval (0, 1)");
  }
}

/// Tallies records with the rule: predicted positive iff score >= threshold.
inline ConfusionCounts confusion_from_predictions(std::span<const PredictionRecord> records,
                                                  double threshold) {
  if (records.empty()) throw DataError("no records");
  ConfusionCounts c;
  for (const auto& r : records) {
    const bool predicted = r.score >= threshold;
    if (r.label == Label::positive) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

inline OperatingPoint rates_from_confusion(const ConfusionCounts& c) {
  if (c.positives() == 0) throw DataError("rate undefined: dataset has no positives");
  if (c.negatives() == 0) throw DataError("rate undefined: dataset has no negatives");
  return {static_cast<double>(c.tp) / static_cast<double>(c.positives()),
          static_cast<double>(c.fp) / static_cast<double>(c.negatives())};
}

struct DatasetPrevalence {
  Prevalence p_plus;
  double imbalance_ratio;
};

inline DatasetPrevalence dataset_prevalence(const ConfusionCounts& c) {
  if (c.positives() == 0) throw DataError("rate undefined: dataset has no positives");
  if (c.negatives() == 0) throw DataError("rate undefined: dataset has no negatives");
  const auto pos = static_cast<double>(c.positives());
  return {Prevalence(pos / static_cast<double>(c.total())),
          pos / static_cast<double>(c.negatives())};
}

/// Precision of an operating point at prevalence eta (Bayes' rule):
///   tpr * eta / (tpr * eta + fpr * (1 - eta)).
/// The endpoints eta = 0 and eta = 1 are allowed; the 0/0 case throws.
inline double adjusted_precision(const OperatingPoint& op, const Prevalence& eta) {
  check_operating_point(op);
  const double hit = op.tpr * eta.value();
  const double den = hit + op.fpr * (1.0 - eta.value());
  if (den == 0.0) throw NumericError("precision undefined at this operating point");
  return hit / den;
}

/// Harmonic mean of adjusted precision and recall (= tpr).
inline double adjusted_f1(const OperatingPoint& op, const Prevalence& eta) {
  double precision = 0.0;
  try {
    precision = adjusted_precision(op, eta);
  } catch (const NumericError&) {
    throw NumericError("F1 undefined: precision and recall are both zero");
  }
  const double recall = op.tpr;
  if (precision + recall == 0.0) throw NumericError("F1 undefined: precision and recall are both zero");
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace imbeval
