// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mpstat {

using MarkIndex = std::uint32_t;

/// Finite categorical mark space with a reference measure given by positive
/// per-label weights. The default weights are the counting measure.
class MarkSpace {
 public:
  explicit MarkSpace(std::vector<std::string> labels);
  MarkSpace(std::vector<std::string> labels, std::vector<double> weights);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::string& label(MarkIndex m) const { return labels_.at(m); }
  double weight(MarkIndex m) const { return weights_.at(m); }

  /// Index of a label; throws when unknown.
  MarkIndex index_of(const std::string& label) const;
  bool has_label(const std::string& label) const;

  MarkSpace with_weights(std::vector<double> weights) const {
    return MarkSpace(labels_, std::move(weights));
  }

  friend bool operator==(const MarkSpace&, const MarkSpace&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
};

/// A subset of mark indices, kept sorted and unique.
class MarkSet {
 public:
  MarkSet() = default;
  MarkSet(std::initializer_list<MarkIndex> members);
  explicit MarkSet(std::vector<MarkIndex> members);

  static MarkSet all(const MarkSpace& space);

  bool contains(MarkIndex m) const;
  bool empty() const { return members_.empty(); }
  std::size_t size() const { return members_.size(); }
  const std::vector<MarkIndex>& members() const { return members_; }

  bool intersects(const MarkSet& other) const;

  /// Reference measure of the set; throws if a member is outside the space.
  double measure(const MarkSpace& space) const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const MarkSet&, const MarkSet&) = default;

 private:
  std::vector<MarkIndex> members_;
};

}  // namespace mpstat
