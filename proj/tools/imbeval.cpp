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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "imbeval/imbeval.hpp"
#include "imbeval/io.hpp"
#include "imbeval/report.hpp"
#include "imbeval/svg.hpp"

namespace {

using namespace imbeval;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Common {
  std::string input;
  std::string format = "csv";
  std::vector<double> etas;
  std::string eta_grid;
  std::vector<double> thresholds;
  std::vector<double> at_recalls;
  int bootstrap = 1000;
  double alpha = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

InputFormat input_format(const std::string& name) {
  if (name == "csv") return InputFormat::csv;
  if (name == "jsonl") return InputFormat::jsonl;
  throw std::invalid_argument("unknown input format: " + name);
}

std::vector<PredictionRecord> load(const Common& c) {
  if (c.input.empty()) throw std::invalid_argument("--input is required");
  return ingest_predictions(c.input, input_format(c.format));
}

// min:max:points, log spaced
PrevalenceGrid parse_eta_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ':')) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw std::invalid_argument("--eta-grid expects min:max:points");
    }
    parts.push_back(v);
  }
  if (parts.size() != 3 || parts[2] < 2 || parts[2] != static_cast<double>(static_cast<std::size_t>(parts[2]))) {
    throw std::invalid_argument("--eta-grid expects min:max:points");
  }
  return PrevalenceGrid::log_spaced(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
}

PrevalenceGrid grid_for(const Common& c, std::optional<double> p_plus) {
  if (!c.eta_grid.empty() && !c.etas.empty()) throw std::invalid_argument("use either --eta or --eta-grid");
  if (!c.etas.empty()) return PrevalenceGrid(c.etas);
  auto grid = c.eta_grid.empty() ? PrevalenceGrid::default_grid() : parse_eta_grid(c.eta_grid);
  return p_plus && *p_plus > 0.0 && *p_plus < 1.0 ? grid.with(*p_plus) : grid;
}

double dataset_p_plus(std::span<const PredictionRecord> records) {
  return dataset_prevalence(confusion_from_predictions(records, std::numeric_limits<double>::infinity()))
      .p_plus.value();
}

void emit_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

void emit_json(const std::string& out, const ordered_json& j) { emit_text(out, j.dump(2) + "\n"); }

bool wants_svg(const std::string& out) { return fs::path(out).extension() == ".svg"; }

void emit(const std::string& out, const Curve& c, const std::string& title) {
  validate(c);
  if (wants_svg(out)) {
    write_text_file(out, render_svg(plot_of(c, title)));
  } else {
    emit_text(out, curve_to_string(c, CurveFormat::csv));
  }
}

// From --tpr/--fpr, or from --input at one --threshold / --at-recall.
OperatingPoint resolve_point(const Common& c, std::optional<double> tpr, std::optional<double> fpr,
                             std::optional<double>& p_plus) {
  if (tpr || fpr) {
    if (!tpr || !fpr) throw std::invalid_argument("--tpr and --fpr go together");
    const OperatingPoint op{*tpr, *fpr};
    check_operating_point(op);
    return op;
  }
  const auto records = load(c);
  p_plus = dataset_p_plus(records);
  if (c.thresholds.size() + c.at_recalls.size() != 1) {
    throw std::invalid_argument("give exactly one --threshold or --at-recall");
  }
  if (!c.thresholds.empty()) {
    const auto rates = rates_from_confusion(confusion_from_predictions(records, c.thresholds[0]));
    return rates;
  }
  return operating_point_at_recall(roc_from_predictions(records), c.at_recalls[0]);
}

struct RatePair {
  double tpr = 0.0, sigma_tpr = 0.0, fpr = 0.0, sigma_fpr = 0.0, confidence = 0.95;
  RateEstimate t() const { return RateEstimate(tpr, sigma_tpr, confidence); }
  RateEstimate f() const { return RateEstimate(fpr, sigma_fpr, confidence); }
};

void add_rate_options(CLI::App* app, RatePair& r) {
  app->add_option("--tpr", r.tpr, "TPR point estimate")->required();
  app->add_option("--sigma-tpr", r.sigma_tpr, "TPR half-width")->required();
  app->add_option("--fpr", r.fpr, "FPR point estimate")->required();
  app->add_option("--sigma-fpr", r.sigma_fpr, "FPR half-width")->required();
  app->add_option("--confidence", r.confidence, "confidence of each half-width");
}

void add_input_options(CLI::App* app, Common& c) {
  app->add_option("--input", c.input, "predictions file with score,label");
  app->add_option("--format", c.format, "input format")->check(CLI::IsMember({"csv", "jsonl"}));
}

void add_grid_options(CLI::App* app, Common& c) {
  app->add_option("--eta", c.etas, "prevalence (repeatable)")->take_all();
  app->add_option("--eta-grid", c.eta_grid, "log grid min:max:points");
}

ordered_json flip_json(std::optional<double> eta_star) {
  return eta_star ? ordered_json(*eta_star) : ordered_json(nullptr);
}

int run(int argc, char** argv) {
  CLI::App app{"Prevalence-aware precision metrics for imbalanced evaluation", "imbeval"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common c;

  // metrics
  auto* metrics = app.add_subcommand("metrics", "JSON report at chosen operating points");
  add_input_options(metrics, c);
  add_grid_options(metrics, c);
  metrics->add_option("--threshold", c.thresholds, "score threshold (repeatable)")->take_all();
  metrics->add_option("--at-recall", c.at_recalls, "target recall (repeatable)")->take_all();
  metrics->add_option("--bootstrap", c.bootstrap, "bootstrap replicates")->check(CLI::Range(100, 1'000'000));
  metrics->add_option("--alpha", c.alpha, "confidence level of rate intervals");
  metrics->add_option("--seed", c.seed, "master seed")->envname("IMBEVAL_SEED");
  metrics->add_option("--threads", c.threads, "worker threads, 0 for all cores");
  metrics->add_option("--out", c.out, "output path (default stdout)");

  // curve
  auto* curve = app.add_subcommand("curve", "ROC, PR and prevalence curves");
  curve->require_subcommand(1);
  std::optional<double> tpr, fpr;
  auto* c_roc = curve->add_subcommand("roc", "ROC curve of a predictions file");
  auto* c_pr = curve->add_subcommand("pr", "PR curve at a prevalence");
  auto* c_p3 = curve->add_subcommand("p3", "precision against prevalence at one operating point");
  auto* c_f1 = curve->add_subcommand("f1", "F1 against prevalence at one operating point");
  auto* c_auc = curve->add_subcommand("pr-auc", "PR-AUC against prevalence");
  for (auto* sub : {c_roc, c_pr, c_p3, c_f1, c_auc}) {
    add_input_options(sub, c);
    sub->add_option("--out", c.out, "output path; .svg renders a plot, otherwise CSV");
  }
  c_pr->add_option("--eta", c.etas, "prevalence (default: the dataset's own)")->expected(0, 1);
  for (auto* sub : {c_p3, c_f1}) {
    add_grid_options(sub, c);
    sub->add_option("--tpr", tpr, "TPR of the operating point");
    sub->add_option("--fpr", fpr, "FPR of the operating point");
    sub->add_option("--threshold", c.thresholds, "score threshold");
    sub->add_option("--at-recall", c.at_recalls, "target recall");
  }
  add_grid_options(c_auc, c);
  c_auc->add_option("--threads", c.threads, "worker threads, 0 for all cores");

  // uncertainty
  auto* unc = app.add_subcommand("uncertainty", "propagate TPR/FPR uncertainty into precision");
  unc->require_subcommand(1);
  RatePair rates;
  auto* u_band = unc->add_subcommand("band", "precision band over prevalences");
  add_rate_options(u_band, rates);
  add_grid_options(u_band, c);
  u_band->add_option("--out", c.out, "output path; .svg renders a plot, otherwise CSV");
  auto* u_delta = unc->add_subcommand("delta", "maximal precision uncertainty and where it occurs");
  add_rate_options(u_delta, rates);
  double sigma = 0.0, alpha = 0.95, known_cv = 0.0, target_delta = 0.0;
  auto* u_plan = unc->add_subcommand("plan", "samples needed for a rate half-width");
  u_plan->add_option("--sigma", sigma, "desired half-width")->required();
  u_plan->add_option("--alpha", alpha, "confidence level");
  auto* u_solve = unc->add_subcommand("solve-cv", "companion CV reaching a target Delta");
  u_solve->add_option("--known-cv", known_cv, "CV of the rate already fixed")->required();
  u_solve->add_option("--delta", target_delta, "target Delta")->required();

  // subsample-sim
  SyntheticDatasetSpec spec;
  double target_eta = 1e-2, std_dev = 1.0;
  int replicates = 30;
  std::size_t grid_points = 101;
  auto* sim = app.add_subcommand("subsample-sim", "spread of PR curves from subsampled negatives");
  sim->add_option("--positives", spec.n_positive, "positive samples");
  sim->add_option("--negatives", spec.n_negative, "negative samples");
  sim->add_option("--mean", spec.positive.mean, "mean score of positives (negatives are N(0,1))");
  sim->add_option("--std", std_dev, "score std of positives");
  sim->add_option("--target-eta", target_eta, "prevalence reached by subsampling");
  sim->add_option("--replicates", replicates, "subsample draws");
  sim->add_option("--recall-points", grid_points, "recall grid size")->check(CLI::Range(2, 100000));
  sim->add_option("--seed", c.seed, "master seed")->envname("IMBEVAL_SEED");
  sim->add_option("--threads", c.threads, "worker threads, 0 for all cores");
  sim->add_option("--out", c.out, "output path; .svg renders a plot, otherwise CSV");

  // compare
  std::string input_b, metric = "pr-auc";
  double recall_a = 0.5, recall_b = 0.5;
  bool synthetic = false;
  auto* cmp = app.add_subcommand("compare", "prevalence at which two classifiers swap order");
  add_input_options(cmp, c);
  add_grid_options(cmp, c);
  cmp->add_option("--input-b", input_b, "second predictions file");
  cmp->add_option("--metric", metric, "ordering metric")->check(CLI::IsMember({"pr-auc", "f1"}));
  cmp->add_option("--recall-a", recall_a, "recall of the first classifier's operating point (f1)");
  cmp->add_option("--recall-b", recall_b, "recall of the second classifier's operating point (f1)");
  cmp->add_flag("--synthetic", synthetic, "search a binormal family for a crossing pair");
  cmp->add_option("--threads", c.threads, "worker threads, 0 for all cores");
  cmp->add_option("--out", c.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  spec.positive.std = std_dev;

  if (metrics->parsed()) {
    ReportRequest req;
    if (c.input.empty()) throw std::invalid_argument("--input is required");
    req.input = c.input;
    req.format = input_format(c.format);
    req.thresholds = c.thresholds;
    req.at_recalls = c.at_recalls;
    if (!c.eta_grid.empty() || !c.etas.empty()) req.prevalences = grid_for(c, std::nullopt).etas();
    req.bootstrap_replicates = c.bootstrap;
    req.alpha = c.alpha;
    req.seed = c.seed;
    req.threads = c.threads;
    emit_json(c.out, to_json(run_report(req)));
  } else if (c_roc->parsed()) {
    emit(c.out, roc_as_curve(roc_from_predictions(load(c))), "ROC");
  } else if (c_pr->parsed()) {
    const auto records = load(c);
    const double eta = c.etas.empty() ? dataset_p_plus(records) : c.etas[0];
    emit(c.out, pr_curve(roc_from_predictions(records), Prevalence(eta)), "Precision-recall");
  } else if (c_p3->parsed() || c_f1->parsed()) {
    std::optional<double> p_plus;
    const auto op = resolve_point(c, tpr, fpr, p_plus);
    const auto grid = grid_for(c, p_plus);
    if (c_p3->parsed()) {
      emit(c.out, p3_curve(op, grid), "Precision against prevalence");
    } else {
      emit(c.out, f1_curve(op, grid), "F1 against prevalence");
    }
  } else if (c_auc->parsed()) {
    const auto records = load(c);
    emit(c.out, pr_auc_curve(roc_from_predictions(records), grid_for(c, dataset_p_plus(records)), c.threads),
         "PR-AUC against prevalence");
  } else if (u_band->parsed()) {
    const auto t = rates.t();
    const auto f = rates.f();
    const auto grid = grid_for(c, std::nullopt);
    std::vector<PrecisionBand> bands;
    for (double eta : grid.etas()) bands.push_back(precision_band(t, f, Prevalence(eta)));
    if (wants_svg(c.out)) {
      SvgPlot plot;
      plot.title = "Precision band";
      plot.x_label = "prevalence";
      plot.y_label = "precision";
      plot.x_scale = Scale::log10;
      SvgBand band{"rate uncertainty", {}, {}, {}};
      SvgSeries point{"point estimate", {}, {}};
      for (const auto& b : bands) {
        band.x.push_back(b.eta);
        band.lower.push_back(b.lower);
        band.upper.push_back(b.upper);
        point.x.push_back(b.eta);
        point.y.push_back(b.point);
      }
      plot.bands.push_back(std::move(band));
      plot.series.push_back(std::move(point));
      write_text_file(c.out, render_svg(plot));
    } else {
      std::string text = "eta,lower,point,upper\n";
      for (const auto& b : bands) {
        text += format_double(b.eta) + ',' + format_double(b.lower) + ',' + format_double(b.point) + ',' +
                format_double(b.upper) + '\n';
      }
      emit_text(c.out, text);
    }
  } else if (u_delta->parsed()) {
    const auto t = rates.t();
    const auto f = rates.f();
    const auto d = max_uncertainty_closed_form(t, f);
    const auto bound = theorem1_bound(t, f);
    ordered_json j;
    j["delta"] = d.delta;
    j["eta_star"] = d.eta_star;
    j["r1"] = d.r1;
    j["r2"] = d.r2;
    j["cv_tpr"] = t.cv();
    j["cv_fpr"] = f.cv();
    j["bound"] = bound.bound;
    j["tight"] = bound.tight;
    j["confidence"] = t.confidence * f.confidence;
    emit_json({}, j);
  } else if (u_plan->parsed()) {
    ordered_json j;
    j["sigma"] = sigma;
    j["alpha"] = alpha;
    j["samples"] = hoeffding_sample_size(sigma, alpha);
    emit_json({}, j);
  } else if (u_solve->parsed()) {
    ordered_json j;
    j["known_cv"] = known_cv;
    j["delta"] = target_delta;
    j["companion_cv"] = solve_companion_cv(known_cv, target_delta);
    emit_json({}, j);
  } else if (sim->parsed()) {
    const auto records = generate_synthetic(spec);
    const auto study = subsample_study(records, Prevalence(target_eta), replicates, linear_grid(0.0, 1.0, grid_points),
                                       c.seed, c.threads);
    if (wants_svg(c.out)) {
      SvgPlot plot;
      plot.title = "Subsampled PR curves";
      plot.x_label = "recall";
      plot.y_label = "precision";
      plot.bands.push_back({"min-max", study.recall_grid, study.min, study.max, "#cccccc", 0.5});
      plot.bands.push_back({"interquartile", study.recall_grid, study.q25, study.q75, "#888888", 0.5});
      plot.series.push_back({"median of subsamples", study.recall_grid, study.median, "#1f77b4", false});
      plot.series.push_back({"adjusted, full data", study.recall_grid, study.adjusted_on_grid, "#d62728", true});
      write_text_file(c.out, render_svg(plot));
    } else {
      std::string text = "# kept_negatives=" + std::to_string(study.kept_negatives) +
                         "\n# replicates=" + std::to_string(study.replicate_count) +
                         "\nrecall,adjusted,min,q25,median,q75,max\n";
      for (std::size_t i = 0; i < study.recall_grid.size(); ++i) {
        for (double v : {study.recall_grid[i], study.adjusted_on_grid[i], study.min[i], study.q25[i],
                         study.median[i], study.q75[i]}) {
          text += format_double(v) + ',';
        }
        text += format_double(study.max[i]) + '\n';
      }
      emit_text(c.out, text);
    }
  } else if (cmp->parsed()) {
    const auto flip_metric = metric == "f1" ? FlipMetric::f1_at_op : FlipMetric::pr_auc;
    ordered_json j;
    j["metric"] = metric;
    if (synthetic) {
      const auto grid = grid_for(c, std::nullopt);
      const auto etas = grid.etas();
      const auto found = search_binormal_flip(flip_metric, grid, etas.front(), etas.back(), c.threads);
      if (found) {
        j["a"] = {{"mean", found->a.mean}, {"std", found->a.std}};
        j["b"] = {{"mean", found->b.mean}, {"std", found->b.std}};
        if (flip_metric == FlipMetric::f1_at_op) {
          j["recall_a"] = found->recall_a;
          j["recall_b"] = found->recall_b;
        }
        j["eta_star"] = found->eta_star;
      } else {
        j["eta_star"] = nullptr;
      }
    } else {
      if (input_b.empty()) throw std::invalid_argument("--input-b is required unless --synthetic");
      const auto a = load(c);
      const auto b = ingest_predictions(input_b, input_format(c.format));
      const auto roc_a = roc_from_predictions(a);
      const auto roc_b = roc_from_predictions(b);
      const auto eta_star = find_ordering_flip(roc_a, roc_b, grid_for(c, std::nullopt),
                                               FlipOptions{flip_metric, recall_a, recall_b});
      j["p_plus_a"] = dataset_p_plus(a);
      j["p_plus_b"] = dataset_p_plus(b);
      j["eta_star"] = flip_json(eta_star);
    }
    emit_json(c.out, j);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const imbeval::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const imbeval::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const imbeval::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
