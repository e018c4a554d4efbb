// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mpstat/geometry.hpp"
#include "mpstat/marks.hpp"
#include "mpstat/pattern.hpp"

namespace mpstat {

/// Uniform-grid bucket index over a window for fixed-radius queries.
///
/// Points are stored cell by cell in compressed row form. A query visits the
/// cells overlapping the bounding square of the ball and filters with the
/// closed-ball predicate, so the result is exactly {i : |z_i - c| <= r}.
/// Results are returned in increasing point index.
class NeighborIndex {
 public:
  /// cell_size <= 0 picks a size giving about two points per cell.
  NeighborIndex(const Window& window, std::span<const Vec2> locations,
                double cell_size = 0.0);
  explicit NeighborIndex(const MarkedPattern& pattern, double cell_size = 0.0);

  std::size_t size() const { return locations_.size(); }
  double cell_size() const { return cell_; }
  const std::vector<Vec2>& locations() const { return locations_; }

  std::vector<std::size_t> query(Vec2 center, double r) const;

  /// Query restricted to points whose mark lies in `marks`. Requires an index
  /// built from a pattern.
  std::vector<std::size_t> query(Vec2 center, double r, const MarkSet& marks) const;

  /// Calls fn(i) for every point within r, in cell order (unsorted).
  template <typename Fn>
  void for_each_within(Vec2 center, double r, Fn&& fn) const {
    if (locations_.empty()) return;
    const int cx0 = clamp_col(center.x - r);
    const int cx1 = clamp_col(center.x + r);
    const int cy0 = clamp_row(center.y - r);
    const int cy1 = clamp_row(center.y + r);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        const std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
          const std::size_t i = items_[k];
          if (within(locations_[i], center, r)) fn(i);
        }
      }
    }
  }

 private:
  int clamp_col(double x) const;
  int clamp_row(double y) const;
  void build();

  Window window_;
  std::vector<Vec2> locations_;
  std::vector<MarkIndex> marks_;
  double cell_ = 0.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

/// Indices of pattern points with ||z_i - center|| <= r and mark in `marks`.
std::vector<std::size_t> ball_query(const NeighborIndex& index, Vec2 center,
                                    double r, const MarkSet& marks);

}  // namespace mpstat
