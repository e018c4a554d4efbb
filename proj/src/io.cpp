// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "mpstat/error.hpp"

namespace mpstat {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Comma separated fields; double quotes protect commas, "" is a literal quote.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": unterminated quote");
  out.emplace_back(trim(field));
  return out;
}

double parse_coordinate(const std::string& s, std::size_t line_no, const char* what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": malformed " + what +
                               " value '" + s + "'");
  }
  if (!std::isfinite(v)) {
    fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": non-finite " + what);
  }
  return v;
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorCode::parse, "header lacks required column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool skip_line(std::string_view s) {
  s = trim(s);
  return s.empty() || s.front() == '#';
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorCode::io, "number formatting failed");
  return std::string(buf, ptr);
}

PatternData ingest(std::istream& in, const IngestConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    header = split_csv(line, line_no);
    break;
  }
  if (header.empty()) fail(ErrorCode::parse, "pattern file is empty (no header row)");
  const std::size_t cx = column_of(header, config.x_column);
  const std::size_t cy = column_of(header, config.y_column);
  const std::size_t cm = column_of(header, config.mark_column);
  const bool split = !config.split_column.empty();
  const std::size_t cs = split ? column_of(header, config.split_column) : 0;

  struct Row {
    Vec2 z;
    std::string mark;
    bool analysis;
  };
  std::vector<Row> rows;
  std::vector<std::string> seen_labels = config.labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != header.size()) {
      fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(f.size()));
    }
    Row r{{parse_coordinate(f[cx], line_no, "x"), parse_coordinate(f[cy], line_no, "y")},
          f[cm], !split || f[cs] == config.split_value};
    if (r.mark.empty()) fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": empty mark");
    if (std::find(seen_labels.begin(), seen_labels.end(), r.mark) == seen_labels.end()) {
      if (!config.labels.empty()) {
        fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": mark '" + r.mark +
                                   "' is not among the configured labels");
      }
      seen_labels.push_back(r.mark);
    }
    rows.push_back(std::move(r));
  }
  if (seen_labels.empty()) fail(ErrorCode::parse, "pattern file has no data rows");

  MarkSpace space = config.nu.empty() ? MarkSpace(seen_labels) : MarkSpace(seen_labels, config.nu);
  std::vector<MarkedPoint> analysis;
  std::vector<MarkedPoint> estimation;
  std::size_t outside = 0;
  std::size_t est_outside = 0;
  for (const Row& r : rows) {
    const MarkedPoint p{r.z, space.index_of(r.mark)};
    const bool inside = config.window.contains(r.z);
    if (!inside) {
      ++(r.analysis ? outside : est_outside);
    } else if (r.analysis) {
      analysis.push_back(p);
    } else {
      estimation.push_back(p);
    }
  }
  if (analysis.empty()) fail(ErrorCode::parse, "no points of the analysis pattern inside the window");

  MarkedPattern pattern(config.window, std::move(space), std::move(analysis),
                        config.dedup ? DuplicatePolicy::keep_first : DuplicatePolicy::reject);
  const std::size_t dups = pattern.duplicates_removed();
  return PatternData{std::move(pattern), std::move(estimation), outside, est_outside, dups};
}

PatternData ingest(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open pattern file '" + path + "'");
  return ingest(in, config);
}

std::vector<MarkedPoint> read_estimation_points(const std::string& path,
                                                const IngestConfig& config,
                                                const MarkSpace& marks,
                                                std::size_t* dropped_outside) {
  IngestConfig cfg = config;
  cfg.labels = marks.labels();
  cfg.nu.clear();
  cfg.split_column.clear();
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open estimation file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    header = split_csv(line, line_no);
    break;
  }
  if (header.empty()) fail(ErrorCode::parse, "estimation file is empty (no header row)");
  const std::size_t cx = column_of(header, cfg.x_column);
  const std::size_t cy = column_of(header, cfg.y_column);
  const std::size_t cm = column_of(header, cfg.mark_column);
  std::vector<MarkedPoint> out;
  std::size_t outside = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != header.size()) {
      fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(f.size()));
    }
    const Vec2 z{parse_coordinate(f[cx], line_no, "x"), parse_coordinate(f[cy], line_no, "y")};
    if (!marks.has_label(f[cm])) {
      fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": mark '" + f[cm] +
                                 "' is not in the mark space");
    }
    if (!cfg.window.contains(z)) {
      ++outside;
      continue;
    }
    out.push_back({z, marks.index_of(f[cm])});
  }
  if (dropped_outside) *dropped_outside = outside;
  return out;
}

void write_pattern_csv(std::ostream& out, const MarkedPattern& pattern) {
  out << "x,y,mark\n";
  for (const auto& p : pattern.points()) {
    out << format_double(p.location.x) << ',' << format_double(p.location.y) << ','
        << quote_if_needed(pattern.markspace().label(p.mark)) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SummaryEstimate& e) {
  out << "r,Fhat,Dhat,Jhat,Khat,n_ref,defined_flags\n";
  for (std::size_t k = 0; k < e.rgrid.size(); ++k) {
    std::string flags = "----";
    if (e.F[k]) flags[0] = 'F';
    if (e.D[k]) flags[1] = 'D';
    if (e.J[k]) flags[2] = 'J';
    if (e.K[k]) flags[3] = 'K';
    out << format_double(e.rgrid[k]) << ',' << format_optional(e.F[k]) << ','
        << format_optional(e.D[k]) << ',' << format_optional(e.J[k]) << ','
        << format_optional(e.K[k]) << ',' << e.n_ref[k] << ',' << flags << '\n';
  }
}

void write_envelope_csv(std::ostream& out, const EnvelopeResult& env) {
  out << "r,observed,lo,hi,mean,n_effective\n";
  for (std::size_t k = 0; k < env.rgrid.size(); ++k) {
    out << format_double(env.rgrid[k]) << ',' << format_optional(env.observed[k]) << ','
        << format_optional(env.lower[k]) << ',' << format_optional(env.upper[k]) << ','
        << format_optional(env.mean[k]) << ',' << env.n_effective[k] << '\n';
  }
}

void write_raster_csv(std::ostream& out, const IntensityModel& model, const Window& window,
                      const MarkSpace& marks, int raster_n) {
  require(raster_n > 0, "raster resolution must be positive");
  out << "x,y,mark,value\n";
  const double dx = window.width() / raster_n;
  const double dy = window.height() / raster_n;
  for (MarkIndex m = 0; m < marks.size(); ++m) {
    const std::string label = quote_if_needed(marks.label(m));
    for (int j = 0; j < raster_n; ++j) {
      for (int i = 0; i < raster_n; ++i) {
        const Vec2 z{window.xmin() + (i + 0.5) * dx, window.ymin() + (j + 0.5) * dy};
        out << format_double(z.x) << ',' << format_double(z.y) << ',' << label << ','
            << format_double(model.evaluate(z, m)) << '\n';
      }
    }
  }
}

}  // namespace mpstat
