// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/pattern.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mpstat/error.hpp"

namespace mpstat {

MarkedPattern::MarkedPattern(Window window, MarkSpace marks,
                             std::vector<MarkedPoint> points,
                             DuplicatePolicy policy)
    : window_(window), marks_(std::move(marks)) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    require(std::isfinite(p.location.x) && std::isfinite(p.location.y),
            "point " + std::to_string(i) + " has non-finite coordinates");
    require(window_.contains(p.location),
            "point " + std::to_string(i) + " lies outside the window");
    require(p.mark < marks_.size(),
            "point " + std::to_string(i) + " has an out-of-range mark");
  }

  // Sort indices by location so repeats are adjacent; ties broken by index
  // so keep_first really keeps the earliest occurrence.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Vec2 pa = points[a].location;
    const Vec2 pb = points[b].location;
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  });
  std::vector<bool> drop(points.size(), false);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (points[order[k]].location == points[order[k - 1]].location) {
      require(policy == DuplicatePolicy::keep_first,
              "duplicate ground location at point " + std::to_string(order[k]) +
                  " (pattern must be simple)");
      drop[order[k]] = true;
      ++duplicates_removed_;
    }
  }
  points_.reserve(points.size() - duplicates_removed_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!drop[i]) points_.push_back(points[i]);
  }
}

std::size_t MarkedPattern::count(const MarkSet& marks) const {
  return static_cast<std::size_t>(std::count_if(
      points_.begin(), points_.end(),
      [&](const MarkedPoint& p) { return marks.contains(p.mark); }));
}

std::vector<Vec2> MarkedPattern::locations() const {
  std::vector<Vec2> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.location);
  return out;
}

std::vector<Vec2> MarkedPattern::locations(const MarkSet& marks) const {
  std::vector<Vec2> out;
  for (const auto& p : points_) {
    if (marks.contains(p.mark)) out.push_back(p.location);
  }
  return out;
}

MarkedPattern MarkedPattern::relabelled(std::span<const MarkIndex> marks) const {
  require(marks.size() == points_.size(), "relabel: one mark per point required");
  std::vector<MarkedPoint> pts = points_;
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].mark = marks[i];
  return MarkedPattern(window_, marks_, std::move(pts));
}

MarkedPattern MarkedPattern::with_markspace(MarkSpace marks) const {
  return MarkedPattern(window_, std::move(marks), points_);
}

MarkSpace MarkedPattern::empirical_markspace() const {
  std::vector<double> w(marks_.size(), 0.0);
  for (const auto& p : points_) w[p.mark] += 1.0;
  const double n = static_cast<double>(points_.size());
  for (double& v : w) v = v > 0.0 ? v / n : 1e-12;
  return marks_.with_weights(std::move(w));
}

}  // namespace mpstat
