// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "mpstat/geometry.hpp"
#include "mpstat/marks.hpp"

namespace mpstat {

struct MarkedPoint {
  Vec2 location;
  MarkIndex mark = 0;

  friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
};

enum class DuplicatePolicy {
  reject,      ///< throw on repeated ground locations
  keep_first,  ///< drop later repeats
};

/// A simple marked point pattern observed in a rectangular window.
class MarkedPattern {
 public:
  MarkedPattern(Window window, MarkSpace marks, std::vector<MarkedPoint> points,
                DuplicatePolicy policy = DuplicatePolicy::reject);

  const Window& window() const { return window_; }
  const MarkSpace& markspace() const { return marks_; }
  const std::vector<MarkedPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const MarkedPoint& operator[](std::size_t i) const { return points_[i]; }

  /// Number of repeats dropped at construction under keep_first.
  std::size_t duplicates_removed() const { return duplicates_removed_; }

  std::size_t count(const MarkSet& marks) const;
  std::vector<Vec2> locations() const;
  std::vector<Vec2> locations(const MarkSet& marks) const;

  /// Same ground locations with a new mark vector.
  MarkedPattern relabelled(std::span<const MarkIndex> marks) const;
  MarkedPattern with_markspace(MarkSpace marks) const;

  /// Mark weights set to the empirical mark distribution n_m / n. Marks that
  /// do not occur receive a tiny positive weight so the space stays valid.
  MarkSpace empirical_markspace() const;

 private:
  Window window_;
  MarkSpace marks_;
  std::vector<MarkedPoint> points_;
  std::size_t duplicates_removed_ = 0;
};

}  // namespace mpstat
