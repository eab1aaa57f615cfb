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

// Precision of two operating points across prevalences, written as CSV and
// SVG. Run from any directory; files land in the working directory.

#include <iostream>

#include "imbeval/imbeval.hpp"
#include "imbeval/svg.hpp"

int main() {
  using namespace imbeval;

  const auto grid = PrevalenceGrid::log_spaced(1e-6, 0.5, 120);
  const OperatingPoint sensitive{0.9, 1e-2};
  const OperatingPoint strict{0.5, 1e-4};

  const auto p3_a = p3_curve(sensitive, grid);
  const auto p3_b = p3_curve(strict, grid);
  emit_curve(p3_a, "p3_sensitive.csv", CurveFormat::csv);
  emit_curve(p3_b, "p3_strict.csv", CurveFormat::csv);

  auto plot = plot_of(p3_a, "Precision against prevalence");
  plot.series[0].label = "tpr 0.9, fpr 1e-2";
  plot.series.push_back({"tpr 0.5, fpr 1e-4", p3_b.x, p3_b.y, "#d62728", true});
  write_text_file("p3.svg", render_svg(plot));

  // F1 ranks the two points differently on either side of this prevalence.
  if (const auto eta = find_ordering_flip(sensitive, strict, grid)) {
    std::cout << "F1 ordering flips at prevalence " << *eta << '\n';
    for (double e : {*eta / 10.0, *eta * 10.0}) {
      std::cout << "  eta " << e << ": F1 " << adjusted_f1(sensitive, Prevalence(e)) << " vs "
                << adjusted_f1(strict, Prevalence(e)) << '\n';
    }
  }
  std::cout << "wrote p3_sensitive.csv, p3_strict.csv, p3.svg\n";
}
