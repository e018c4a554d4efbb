// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>

namespace mpstat {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double euclidean_distance(Vec2 a, Vec2 b) {
  return std::sqrt(squared_distance(a, b));
}

/// Closed-ball membership. All neighbour code goes through this predicate so
/// indexed and brute-force paths agree on boundary cases.
inline bool within(Vec2 a, Vec2 b, double r) {
  return squared_distance(a, b) <= r * r;
}

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
class Window {
 public:
  Window(double xmin, double xmax, double ymin, double ymax);

  double xmin() const { return xmin_; }
  double xmax() const { return xmax_; }
  double ymin() const { return ymin_; }
  double ymax() const { return ymax_; }
  double width() const { return xmax_ - xmin_; }
  double height() const { return ymax_ - ymin_; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (xmin_ + xmax_), 0.5 * (ymin_ + ymax_)}; }

  bool contains(Vec2 p) const {
    return p.x >= xmin_ && p.x <= xmax_ && p.y >= ymin_ && p.y <= ymax_;
  }

  /// Distance from an interior point to the boundary.
  double boundary_distance(Vec2 p) const {
    return std::fmin(std::fmin(p.x - xmin_, xmax_ - p.x),
                     std::fmin(p.y - ymin_, ymax_ - p.y));
  }

  /// Maps p onto the half-open torus [xmin, xmax) x [ymin, ymax).
  Vec2 wrap(Vec2 p) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  double xmin_, xmax_, ymin_, ymax_;
};

/// W eroded by r, i.e. the points at distance >= r from the boundary.
/// Empty when either side interval degenerates.
std::optional<Window> erode(const Window& window, double r);

/// Flat-torus distance: the minimum over periodic images of b.
double torus_distance(const Window& window, Vec2 a, Vec2 b);

}  // namespace mpstat
