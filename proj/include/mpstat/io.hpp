// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpstat/estimators.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/mctest.hpp"
#include "mpstat/pattern.hpp"

namespace mpstat {

/// How a pattern CSV is read. The file has a header row naming its columns;
/// x, y and mark columns are required, anything else is auxiliary.
struct IngestConfig {
  Window window{0.0, 1.0, 0.0, 1.0};
  /// Fixed label order; empty means order of first occurrence in the file.
  std::vector<std::string> labels;
  /// Reference weights per label; empty means counting measure.
  std::vector<double> nu;
  /// Keep the first of repeated locations (true) or fail (false).
  bool dedup = true;
  /// When set, rows whose split column equals split_value form the analysis
  /// pattern and all other rows the estimation set.
  std::string split_column;
  std::string split_value;
  std::string x_column = "x";
  std::string y_column = "y";
  std::string mark_column = "mark";
};

struct PatternData {
  MarkedPattern analysis;
  /// Held-out rows (split mode) used to estimate intensities. Not
  /// deduplicated: repeated locations carry kernel weight.
  std::vector<MarkedPoint> estimation;
  std::size_t dropped_outside = 0;
  std::size_t estimation_dropped_outside = 0;
  std::size_t duplicates_removed = 0;
};

PatternData ingest(std::istream& in, const IngestConfig& config);
PatternData ingest(const std::string& path, const IngestConfig& config);

/// Every row of a CSV inside the window, marks mapped onto `marks` (unknown
/// labels are an error). Repeated locations are kept.
std::vector<MarkedPoint> read_estimation_points(const std::string& path,
                                                const IngestConfig& config,
                                                const MarkSpace& marks,
                                                std::size_t* dropped_outside = nullptr);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_pattern_csv(std::ostream& out, const MarkedPattern& pattern);
void write_summary_csv(std::ostream& out, const SummaryEstimate& estimate);
void write_envelope_csv(std::ostream& out, const EnvelopeResult& envelope);
/// Midpoint raster of every mark: columns x, y, mark, value.
void write_raster_csv(std::ostream& out, const IntensityModel& model, const Window& window,
                      const MarkSpace& marks, int raster_n);

}  // namespace mpstat
