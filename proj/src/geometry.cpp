// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/geometry.hpp"

#include <string>

#include "mpstat/error.hpp"

namespace mpstat {

Window::Window(double xmin, double xmax, double ymin, double ymax)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
  require(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) &&
              std::isfinite(ymax),
          "window bounds must be finite");
  require(xmin < xmax && ymin < ymax,
          "window requires xmin < xmax and ymin < ymax");
}

namespace {

double wrap_coordinate(double v, double lo, double len) {
  double t = std::fmod(v - lo, len);
  if (t < 0.0) t += len;
  // fmod of a tiny negative value can round up to len.
  if (t >= len) t = 0.0;
  return lo + t;
}

double periodic_gap(double a, double b, double len) {
  const double d = std::fabs(a - b);
  return std::fmin(d, len - d);
}

}  // namespace

Vec2 Window::wrap(Vec2 p) const {
  return {wrap_coordinate(p.x, xmin_, width()),
          wrap_coordinate(p.y, ymin_, height())};
}

std::optional<Window> erode(const Window& window, double r) {
  require(r >= 0.0, "erosion radius must be nonnegative");
  const double x0 = window.xmin() + r;
  const double x1 = window.xmax() - r;
  const double y0 = window.ymin() + r;
  const double y1 = window.ymax() - r;
  if (!(x0 < x1) || !(y0 < y1)) return std::nullopt;
  return Window(x0, x1, y0, y1);
}

double torus_distance(const Window& window, Vec2 a, Vec2 b) {
  const double dx = periodic_gap(a.x, b.x, window.width());
  const double dy = periodic_gap(a.y, b.y, window.height());
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace mpstat
