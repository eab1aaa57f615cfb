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

// Static SVG line plots with optional shaded bands. Output depends only on
// the input data, so repeated renders are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "imbeval/curves.hpp"
#include "imbeval/error.hpp"
#include "imbeval/io.hpp"

namespace imbeval {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct SvgBand {
  std::string label;
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "#999999";
  double opacity = 0.3;
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  Scale x_scale = Scale::linear;
  std::vector<SvgBand> bands;
  std::vector<SvgSeries> series;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const SvgPlot& plot) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
  const bool log_x = plot.x_scale == Scale::log10;

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min, y_min = x_min, y_max = -x_min;
  auto take_x = [&](double x) {
    if (!std::isfinite(x) || (log_x && x <= 0.0)) return;
    const double v = log_x ? std::log10(x) : x;
    x_min = std::min(x_min, v);
    x_max = std::max(x_max, v);
  };
  auto take_y = [&](double y) {
    if (!std::isfinite(y)) return;
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  };
  for (const auto& s : plot.series) {
    for (double x : s.x) take_x(x);
    for (double y : s.y) take_y(y);
  }
  for (const auto& b : plot.bands) {
    for (double x : b.x) take_x(x);
    for (double y : b.lower) take_y(y);
    for (double y : b.upper) take_y(y);
  }
  if (!std::isfinite(x_min)) x_min = 0.0, x_max = 1.0;
  if (!std::isfinite(y_min)) y_min = 0.0, y_max = 1.0;
  if (y_min >= 0.0 && y_max <= 1.0) y_min = 0.0, y_max = 1.0;
  if (log_x) x_min = std::floor(x_min), x_max = std::ceil(x_max);
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + ((log_x ? std::log10(x) : x) - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };
  auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!plot.title.empty()) {
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << detail::escape_xml(plot.title) << "</text>\n";
  }

  // Grid and ticks.
  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  std::vector<std::pair<double, std::string>> x_ticks;
  if (log_x) {
    for (double e = x_min; e <= x_max + 1e-9; e += 1.0) {
      x_ticks.emplace_back(kLeft + (e - x_min) / (x_max - x_min) * pw, "1e" + detail::tick_label(e));
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = x_min + (x_max - x_min) * i / 5.0;
      x_ticks.emplace_back(kLeft + pw * i / 5.0, detail::tick_label(v));
    }
  }
  std::vector<std::pair<double, std::string>> y_ticks;
  for (int i = 0; i <= 5; ++i) {
    const double v = y_min + (y_max - y_min) * i / 5.0;
    y_ticks.emplace_back(py(v), detail::tick_label(v));
  }
  for (const auto& [pos, _] : x_ticks) {
    svg << "<line x1=\"" << detail::fmt2(pos) << "\" y1=\"" << kTop << "\" x2=\"" << detail::fmt2(pos)
        << "\" y2=\"" << kTop + ph << "\"/>\n";
  }
  for (const auto& [pos, _] : y_ticks) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << detail::fmt2(pos) << "\" x2=\"" << kLeft + pw << "\" y2=\""
        << detail::fmt2(pos) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& [pos, text] : x_ticks) {
    svg << "<text x=\"" << detail::fmt2(pos) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
        << text << "</text>\n";
  }
  for (const auto& [pos, text] : y_ticks) {
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << detail::fmt2(pos + 4) << "\" text-anchor=\"end\">" << text
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
      << detail::escape_xml(plot.x_label) << (log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape_xml(plot.y_label) << "</text>\n";

  for (const auto& b : plot.bands) {
    std::string points;
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (usable(b.x[i], b.upper[i])) points += detail::fmt2(px(b.x[i])) + "," + detail::fmt2(py(b.upper[i])) + " ";
    }
    for (std::size_t i = b.x.size(); i-- > 0;) {
      if (usable(b.x[i], b.lower[i])) points += detail::fmt2(px(b.x[i])) + "," + detail::fmt2(py(b.lower[i])) + " ";
    }
    svg << "<polygon fill=\"" << b.color << "\" fill-opacity=\"" << b.opacity << "\" stroke=\"none\" points=\""
        << points << "\"><title>" << detail::escape_xml(b.label) << "</title></polygon>\n";
  }
  for (const auto& s : plot.series) {
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (usable(s.x[i], s.y[i])) points += detail::fmt2(px(s.x[i])) + "," + detail::fmt2(py(s.y[i])) + " ";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << points << "\"><title>"
        << detail::escape_xml(s.label) << "</title></polyline>\n";
  }

  // Legend.
  double ly = kTop + 14;
  auto legend = [&](const std::string& label, const std::string& color, bool filled) {
    if (label.empty()) return;
    if (filled) {
      svg << "<rect x=\"" << kLeft + pw - 150 << "\" y=\"" << ly - 9 << "\" width=\"18\" height=\"10\" fill=\""
          << color << "\" fill-opacity=\"0.4\"/>\n";
    } else {
      svg << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw - 132
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    }
    svg << "<text x=\"" << kLeft + pw - 126 << "\" y=\"" << ly << "\">" << detail::escape_xml(label) << "</text>\n";
    ly += 16;
  };
  for (const auto& b : plot.bands) legend(b.label, b.color, true);
  for (const auto& s : plot.series) legend(s.label, s.color, false);
  svg << "</svg>\n";
  return svg.str();
}

inline SvgPlot plot_of(const Curve& c, std::string title = {}) {
  SvgPlot plot;
  plot.title = std::move(title);
  plot.x_label = std::string(axis_name(c.x_axis));
  plot.y_label = std::string(axis_name(c.y_axis));
  plot.x_scale = c.x_scale;
  SvgSeries s;
  s.label = std::string(axis_name(c.y_axis));
  if (c.eta) s.label += " @ eta=" + detail::tick_label(*c.eta);
  s.x = c.x;
  s.y = c.y;
  plot.series.push_back(std::move(s));
  return plot;
}

enum class CurveFormat { csv, svg };

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("cannot write " + path.string());
}

inline std::string curve_to_string(const Curve& c, CurveFormat format) {
  if (format == CurveFormat::svg) return render_svg(plot_of(c));
  std::ostringstream os;
  write_curve_csv(c, os);
  return os.str();
}

inline void emit_curve(const Curve& c, const std::filesystem::path& path, CurveFormat format) {
  validate(c);
  write_text_file(path, curve_to_string(c, format));
}

}  // namespace imbeval
