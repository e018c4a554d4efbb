// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/marks.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mpstat/error.hpp"

namespace mpstat {

MarkSpace::MarkSpace(std::vector<std::string> labels)
    : MarkSpace(labels, std::vector<double>(labels.size(), 1.0)) {}

MarkSpace::MarkSpace(std::vector<std::string> labels, std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  require(!labels_.empty(), "mark space needs at least one label");
  require(labels_.size() == weights_.size(),
          "mark space: one weight per label required");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    require(seen.insert(l).second, "duplicate mark label '" + l + "'");
  }
  for (double w : weights_) {
    require(std::isfinite(w) && w > 0.0, "mark weights must be positive");
  }
}

MarkIndex MarkSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  require(it != labels_.end(), "unknown mark label '" + label + "'");
  return static_cast<MarkIndex>(it - labels_.begin());
}

bool MarkSpace::has_label(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

MarkSet::MarkSet(std::initializer_list<MarkIndex> members)
    : MarkSet(std::vector<MarkIndex>(members)) {}

MarkSet::MarkSet(std::vector<MarkIndex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

MarkSet MarkSet::all(const MarkSpace& space) {
  std::vector<MarkIndex> m(space.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<MarkIndex>(i);
  return MarkSet(std::move(m));
}

bool MarkSet::contains(MarkIndex m) const {
  return std::binary_search(members_.begin(), members_.end(), m);
}

bool MarkSet::intersects(const MarkSet& other) const {
  return std::any_of(members_.begin(), members_.end(),
                     [&](MarkIndex m) { return other.contains(m); });
}

double MarkSet::measure(const MarkSpace& space) const {
  double total = 0.0;
  for (MarkIndex m : members_) {
    require(m < space.size(), "mark set member outside the mark space");
    total += space.weight(m);
  }
  return total;
}

}  // namespace mpstat
