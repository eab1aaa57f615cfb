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

// Prediction ingestion (CSV / JSONL) and curve CSV serialization.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "imbeval/core_metrics.hpp"
#include "imbeval/curves.hpp"
#include "imbeval/error.hpp"

namespace imbeval {

enum class InputFormat { csv, jsonl };

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] inline void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

// Tracks which label convention a file uses; 1 is shared by both.
class LabelConvention {
 public:
  Label accept(long code, std::size_t line) {
    if (code != -1 && code != 0 && code != 1) {
      fail_line(line, "label must be -1, 0 or 1 (got " + std::to_string(code) + ")");
    }
    if (code == -1) minus_one_ = true;
    if (code == 0) zero_ = true;
    if (minus_one_ && zero_) fail_line(line, "mixed label conventions ({-1,1} and {0,1})");
    return label_from_int(code);
  }

 private:
  bool minus_one_ = false;
  bool zero_ = false;
};

inline double checked_score(std::optional<double> score, std::size_t line) {
  if (!score) fail_line(line, "score is not a decimal number");
  if (!std::isfinite(*score)) fail_line(line, "score must be finite");
  return *score;
}

}  // namespace detail

/// CSV with header `score,label`; LF or CRLF line endings; blank lines are
/// skipped. Errors carry the 1-based line number.
inline std::vector<PredictionRecord> read_predictions_csv(std::istream& in) {
  std::vector<PredictionRecord> out;
  detail::LabelConvention labels;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = detail::trim(view);
    if (view.empty()) continue;
    if (!header) {
      if (view != "score,label") detail::fail_line(line_no, "expected header 'score,label'");
      header = true;
      continue;
    }
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      detail::fail_line(line_no, "expected two fields 'score,label'");
    }
    const double score = detail::checked_score(detail::parse_double(detail::trim(view.substr(0, comma))), line_no);
    const auto code = detail::parse_long(detail::trim(view.substr(comma + 1)));
    if (!code) detail::fail_line(line_no, "label is not an integer");
    out.push_back({score, labels.accept(*code, line_no)});
  }
  if (!header) throw DataError("line 1: missing header 'score,label'");
  return out;
}

/// One JSON object per line with numeric `score` and `label` fields.
inline std::vector<PredictionRecord> read_predictions_jsonl(std::istream& in) {
  std::vector<PredictionRecord> out;
  detail::LabelConvention labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      detail::fail_line(line_no, "invalid JSON");
    }
    if (!obj.is_object() || !obj.contains("score") || !obj.contains("label")) {
      detail::fail_line(line_no, "expected an object with 'score' and 'label'");
    }
    const auto& s = obj["score"];
    const auto& l = obj["label"];
    if (!s.is_number()) detail::fail_line(line_no, "score is not a number");
    if (!l.is_number_integer()) detail::fail_line(line_no, "label is not an integer");
    const double score = detail::checked_score(s.get<double>(), line_no);
    out.push_back({score, labels.accept(l.get<long>(), line_no)});
  }
  return out;
}

inline std::vector<PredictionRecord> ingest_predictions(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return format == InputFormat::csv ? read_predictions_csv(in) : read_predictions_jsonl(in);
}

/// Header comments carry the axis semantics, then an `x,y` table.
inline void write_curve_csv(const Curve& c, std::ostream& out) {
  out << "# x_axis=" << axis_name(c.x_axis) << '\n';
  out << "# y_axis=" << axis_name(c.y_axis) << '\n';
  out << "# x_scale=" << (c.x_scale == Scale::log10 ? "log10" : "linear") << '\n';
  if (c.eta) out << "# eta=" << format_double(*c.eta) << '\n';
  if (c.dropped > 0) out << "# dropped=" << c.dropped << '\n';
  out << "x,y\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    out << format_double(c.x[i]) << ',' << format_double(c.y[i]) << '\n';
  }
}

inline Curve read_curve_csv(std::istream& in) {
  Curve c;
  std::string line;
  std::size_t line_no = 0;
  bool table = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto body = detail::trim(view.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = body.substr(0, eq);
      const auto value = body.substr(eq + 1);
      if (key == "x_axis" || key == "y_axis") {
        const auto axis = axis_from_name(value);
        if (!axis) detail::fail_line(line_no, "unknown axis");
        (key == "x_axis" ? c.x_axis : c.y_axis) = *axis;
      } else if (key == "x_scale") {
        c.x_scale = value == "log10" ? Scale::log10 : Scale::linear;
      } else if (key == "eta") {
        c.eta = detail::parse_double(value);
      } else if (key == "dropped") {
        c.dropped = static_cast<std::size_t>(detail::parse_long(value).value_or(0));
      }
      continue;
    }
    if (!table) {
      if (view != "x,y") detail::fail_line(line_no, "expected header 'x,y'");
      table = true;
      continue;
    }
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) detail::fail_line(line_no, "expected 'x,y'");
    const auto x = detail::parse_double(view.substr(0, comma));
    const auto y = detail::parse_double(view.substr(comma + 1));
    if (!x || !y) detail::fail_line(line_no, "malformed number");
    c.x.push_back(*x);
    c.y.push_back(*y);
  }
  return c;
}

}  // namespace imbeval
