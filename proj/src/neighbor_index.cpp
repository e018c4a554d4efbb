// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/neighbor_index.hpp"

#include <algorithm>
#include <cmath>

#include "mpstat/error.hpp"

namespace mpstat {

namespace {
constexpr int kMaxCellsPerAxis = 4096;
}

NeighborIndex::NeighborIndex(const Window& window, std::span<const Vec2> locations,
                             double cell_size)
    : window_(window), locations_(locations.begin(), locations.end()), cell_(cell_size) {
  build();
}

NeighborIndex::NeighborIndex(const MarkedPattern& pattern, double cell_size)
    : window_(pattern.window()), locations_(pattern.locations()), cell_(cell_size) {
  marks_.reserve(pattern.size());
  for (const auto& p : pattern.points()) marks_.push_back(p.mark);
  build();
}

void NeighborIndex::build() {
  const double n = static_cast<double>(std::max<std::size_t>(locations_.size(), 1));
  if (!(cell_ > 0.0)) cell_ = std::sqrt(2.0 * window_.area() / n);
  const double min_cell =
      std::max(window_.width(), window_.height()) / kMaxCellsPerAxis;
  cell_ = std::max(cell_, min_cell);
  nx_ = std::max(1, static_cast<int>(std::ceil(window_.width() / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(window_.height() / cell_)));

  const std::size_t ncell = static_cast<std::size_t>(nx_) * ny_;
  std::vector<std::size_t> cell_of(locations_.size());
  start_.assign(ncell + 1, 0);
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    const Vec2 p = locations_[i];
    cell_of[i] = static_cast<std::size_t>(clamp_row(p.y)) * nx_ + clamp_col(p.x);
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
  items_.resize(locations_.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < locations_.size(); ++i) items_[fill[cell_of[i]]++] = i;
}

int NeighborIndex::clamp_col(double x) const {
  const double c = std::floor((x - window_.xmin()) / cell_);
  return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(nx_ - 1)));
}

int NeighborIndex::clamp_row(double y) const {
  const double c = std::floor((y - window_.ymin()) / cell_);
  return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(ny_ - 1)));
}

std::vector<std::size_t> NeighborIndex::query(Vec2 center, double r) const {
  require(r >= 0.0, "query radius must be nonnegative");
  std::vector<std::size_t> out;
  for_each_within(center, r, [&](std::size_t i) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> NeighborIndex::query(Vec2 center, double r,
                                              const MarkSet& marks) const {
  require(r >= 0.0, "query radius must be nonnegative");
  require(marks_.size() == locations_.size(),
          "mark-filtered query needs an index built from a marked pattern");
  std::vector<std::size_t> out;
  for_each_within(center, r, [&](std::size_t i) {
    if (marks.contains(marks_[i])) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> ball_query(const NeighborIndex& index, Vec2 center,
                                    double r, const MarkSet& marks) {
  return index.query(center, r, marks);
}

}  // namespace mpstat
