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

// Subsamples negatives of a synthetic test set down to a target prevalence
// and compares the spread of the resulting PR curves with the curve adjusted
// analytically from the full set.

#include <algorithm>
#include <iostream>

#include "imbeval/imbeval.hpp"
#include "imbeval/svg.hpp"

int main() {
  using namespace imbeval;

  const SyntheticDatasetSpec spec{5, 4995, {2.0, 1.0}, 2024};
  const auto records = generate_synthetic(spec);
  const auto study = subsample_study(records, Prevalence(1e-2), 30, linear_grid(0.0, 1.0, 101), 7, 0);

  double widest = 0.0;
  for (std::size_t i = 0; i < study.recall_grid.size(); ++i) widest = std::max(widest, study.iqr_width(i));
  std::cout << "dataset prevalence " << spec.p_plus() << ", kept " << study.kept_negatives
            << " negatives per replicate\n"
            << "widest interquartile range of subsampled precision: " << widest << '\n';

  SvgPlot plot;
  plot.title = "Subsampled PR curves at prevalence 0.01";
  plot.x_label = "recall";
  plot.y_label = "precision";
  plot.bands.push_back({"min-max", study.recall_grid, study.min, study.max, "#cccccc", 0.5});
  plot.bands.push_back({"interquartile", study.recall_grid, study.q25, study.q75, "#888888", 0.5});
  plot.series.push_back({"median", study.recall_grid, study.median, "#1f77b4", false});
  plot.series.push_back({"adjusted", study.recall_grid, study.adjusted_on_grid, "#d62728", true});
  write_text_file("subsample.svg", render_svg(plot));
  std::cout << "wrote subsample.svg\n";
}
