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

/// @file report.hpp
/// JSON evaluation report: dataset summary, bootstrapped operating points,
/// and precision / F1 with uncertainty at every requested prevalence. Each
/// adjusted figure sits next to the test set's own prevalence.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "imbeval/core_metrics.hpp"
#include "imbeval/curves.hpp"
#include "imbeval/error.hpp"
#include "imbeval/io.hpp"
#include "imbeval/parallel.hpp"
#include "imbeval/uncertainty.hpp"
#include "imbeval/version.hpp"

namespace imbeval {

inline constexpr int kReportSchemaVersion = 1;

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

struct ReportRequest {
  std::filesystem::path input;
  InputFormat format = InputFormat::csv;
  std::vector<double> thresholds;
  std::vector<double> at_recalls;   // each picks the highest threshold reaching it
  std::vector<double> prevalences;  // empty: the dataset's own p+
  int bootstrap_replicates = 1000;
  double alpha = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PrevalenceEntry {
  double eta = 0.0;
  double dataset_p_plus = 0.0;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<PrecisionInterval> corollary;
  std::optional<PrecisionBand> band;
  std::vector<std::string> notes;
};

struct OperatingPointEntry {
  double threshold = 0.0;
  std::optional<double> requested_recall;
  ConfusionCounts counts;
  RateEstimate tpr;
  RateEstimate fpr;
  std::optional<double> precision_at_dataset;  // TP / (TP + FP)
  std::optional<DeltaResult> delta;
  std::optional<Theorem1Bound> theorem1;
  std::vector<PrevalenceEntry> prevalences;
  std::vector<std::string> notes;
};

struct EvaluationReport {
  std::uint64_t n = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  double p_plus = 0.0;
  double imbalance_ratio = 0.0;
  std::vector<double> requested_prevalences;
  std::vector<OperatingPointEntry> operating_points;
  std::string input_sha256;
  std::uint64_t seed = 0;
  int bootstrap_replicates = 0;
  double alpha = 0.0;
};

inline EvaluationReport run_report(const ReportRequest& req) {
  if (req.thresholds.empty() && req.at_recalls.empty()) {
    throw std::invalid_argument("report needs at least one threshold or target recall");
  }
  const auto records = ingest_predictions(req.input, req.format);
  if (records.empty()) throw DataError("no records");

  EvaluationReport rep;
  rep.input_sha256 = sha256_file(req.input);
  rep.seed = req.seed;
  rep.bootstrap_replicates = req.bootstrap_replicates;
  rep.alpha = req.alpha;
  const auto totals = confusion_from_predictions(records, std::numeric_limits<double>::infinity());
  const auto prevalence = dataset_prevalence(totals);
  rep.n = totals.total();
  rep.positives = totals.positives();
  rep.negatives = totals.negatives();
  rep.p_plus = prevalence.p_plus.value();
  rep.imbalance_ratio = prevalence.imbalance_ratio;
  rep.requested_prevalences = req.prevalences.empty() ? std::vector<double>{rep.p_plus} : req.prevalences;
  for (double eta : rep.requested_prevalences) require_interior(Prevalence(eta));

  std::vector<std::pair<double, std::optional<double>>> thresholds;
  for (double t : req.thresholds) thresholds.emplace_back(t, std::nullopt);
  if (!req.at_recalls.empty()) {
    const auto roc = roc_from_predictions(records);
    for (double r : req.at_recalls) {
      if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("target recall must lie in (0, 1]");
      thresholds.emplace_back(roc.thresholds[index_at_recall(roc, r)], r);
    }
  }

  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    OperatingPointEntry op;
    op.threshold = thresholds[i].first;
    op.requested_recall = thresholds[i].second;
    op.counts = confusion_from_predictions(records, op.threshold);
    op.tpr = bootstrap_rate_estimate(records, op.threshold, RateKind::tpr, req.bootstrap_replicates, req.alpha,
                                     derive_seed(req.seed, 2 * i), req.threads);
    op.fpr = bootstrap_rate_estimate(records, op.threshold, RateKind::fpr, req.bootstrap_replicates, req.alpha,
                                     derive_seed(req.seed, 2 * i + 1), req.threads);
    if (op.counts.tp + op.counts.fp > 0) {
      op.precision_at_dataset = static_cast<double>(op.counts.tp) / static_cast<double>(op.counts.tp + op.counts.fp);
    }
    const bool bounded = op.tpr.strictly_bounded() && op.fpr.strictly_bounded();
    if (bounded) {
      op.delta = max_uncertainty_closed_form(op.tpr, op.fpr);
      op.theorem1 = theorem1_bound(op.tpr, op.fpr);
    } else {
      op.notes.push_back("Delta unavailable: a rate's half-width is not below its point estimate");
    }
    const OperatingPoint point{op.tpr.value, op.fpr.value};
    for (double eta_value : rep.requested_prevalences) {
      const Prevalence eta(eta_value);
      PrevalenceEntry e;
      e.eta = eta_value;
      e.dataset_p_plus = rep.p_plus;
      try {
        e.precision = adjusted_precision(point, eta);
      } catch (const NumericError& err) {
        e.notes.emplace_back(err.what());
      }
      try {
        e.f1 = adjusted_f1(point, eta);
      } catch (const NumericError& err) {
        e.notes.emplace_back(err.what());
      }
      if (bounded) e.corollary = corollary_interval(op.tpr, op.fpr, eta);
      try {
        if (e.precision) e.band = precision_band(op.tpr, op.fpr, eta);
      } catch (const NumericError& err) {
        e.notes.emplace_back(err.what());
      }
      op.prevalences.push_back(std::move(e));
    }
    rep.operating_points.push_back(std::move(op));
  }
  return rep;
}

namespace detail {

inline nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

// JSON has no infinity; thresholds at +-inf are written as strings.
inline nlohmann::ordered_json threshold_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}

inline nlohmann::ordered_json rate_json(const RateEstimate& r) {
  nlohmann::ordered_json j;
  j["value"] = r.value;
  j["half_width"] = r.half_width;
  j["confidence"] = r.confidence;
  j["cv"] = r.value > 0.0 ? nlohmann::ordered_json(r.cv()) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const EvaluationReport& rep) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["dataset"] = {{"n", rep.n},
                  {"positives", rep.positives},
                  {"negatives", rep.negatives},
                  {"p_plus", rep.p_plus},
                  {"imbalance_ratio", rep.imbalance_ratio}};
  j["requested_prevalences"] = rep.requested_prevalences;
  ordered_json ops = ordered_json::array();
  for (const auto& op : rep.operating_points) {
    ordered_json o;
    o["threshold"] = detail::threshold_json(op.threshold);
    o["requested_recall"] = detail::optional_number(op.requested_recall);
    o["counts"] = {{"tp", op.counts.tp}, {"fp", op.counts.fp}, {"tn", op.counts.tn}, {"fn", op.counts.fn}};
    o["tpr"] = detail::rate_json(op.tpr);
    o["fpr"] = detail::rate_json(op.fpr);
    o["dataset_p_plus"] = rep.p_plus;
    o["precision_at_dataset_p_plus"] = detail::optional_number(op.precision_at_dataset);
    if (op.delta) {
      o["delta"] = {{"delta", op.delta->delta},
                    {"eta_star", op.delta->eta_star},
                    {"r1", op.delta->r1},
                    {"r2", op.delta->r2},
                    {"theorem1_bound", op.theorem1->bound},
                    {"theorem1_tight", op.theorem1->tight}};
    } else {
      o["delta"] = nullptr;
    }
    ordered_json prevs = ordered_json::array();
    for (const auto& e : op.prevalences) {
      ordered_json p;
      p["eta"] = e.eta;
      p["dataset_p_plus"] = e.dataset_p_plus;
      p["precision"] = detail::optional_number(e.precision);
      p["f1"] = detail::optional_number(e.f1);
      if (e.corollary) {
        p["corollary_interval"] = {{"lower", e.corollary->lower},
                                   {"point", e.corollary->point},
                                   {"upper", e.corollary->upper},
                                   {"delta", e.corollary->delta},
                                   {"confidence", e.corollary->confidence}};
      } else {
        p["corollary_interval"] = nullptr;
      }
      if (e.band) {
        p["band"] = {{"lower", e.band->lower},
                     {"point", e.band->point},
                     {"upper", e.band->upper},
                     {"degenerate_upper", e.band->degenerate_upper}};
      } else {
        p["band"] = nullptr;
      }
      if (!e.notes.empty()) p["notes"] = e.notes;
      prevs.push_back(std::move(p));
    }
    o["prevalences"] = std::move(prevs);
    if (!op.notes.empty()) o["notes"] = op.notes;
    ops.push_back(std::move(o));
  }
  j["operating_points"] = std::move(ops);
  j["provenance"] = {{"input_sha256", rep.input_sha256},
                     {"seed", rep.seed},
                     {"bootstrap_replicates", rep.bootstrap_replicates},
                     {"alpha", rep.alpha},
                     {"tool_version", std::string(kVersion)}};
  return j;
}

}  // namespace imbeval
