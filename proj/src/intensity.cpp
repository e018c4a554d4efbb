// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mpstat/error.hpp"

namespace mpstat {

namespace {

// Kernel contributions beyond this many bandwidths are dropped; the neglected
// tail (exp(-32) relative) sits far below the intensity floor.
constexpr double kCutoffSigmas = 8.0;

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

template <typename Fn>
void for_each_midpoint(const Window& w, int n, Fn&& fn) {
  const double dx = w.width() / n;
  const double dy = w.height() / n;
  for (int j = 0; j < n; ++j) {
    const double y = w.ymin() + (j + 0.5) * dy;
    for (int i = 0; i < n; ++i) fn(Vec2{w.xmin() + (i + 0.5) * dx, y});
  }
}

}  // namespace

IntensityModel::IntensityModel(Window domain, double floor)
    : domain_(domain), floor_(floor) {
  require(std::isfinite(floor) && floor > 0.0, "intensity floor must be positive");
}

double IntensityModel::integral(MarkIndex mark, const Window& window,
                                int raster_n) const {
  require(raster_n > 0, "raster resolution must be positive");
  double sum = 0.0;
  for_each_midpoint(window, raster_n, [&](Vec2 z) { sum += evaluate(z, mark); });
  return sum * window.area() / (static_cast<double>(raster_n) * raster_n);
}

double intensity_floor(double scale) {
  if (std::isfinite(scale) && scale > 0.0) return 1e-10 * scale;
  return std::numeric_limits<double>::min();
}

// ---------------------------------------------------------------------------

namespace {
double max_value(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}
}  // namespace

ConstantIntensity::ConstantIntensity(Window domain, std::vector<double> values)
    : IntensityModel(domain, intensity_floor(max_value(values))),
      values_(std::move(values)) {
  require(!values_.empty(), "constant intensity needs one value per mark");
  for (double v : values_) {
    require(std::isfinite(v) && v >= 0.0, "intensity values must be finite and >= 0");
  }
}

double ConstantIntensity::integral(MarkIndex mark, const Window& window, int) const {
  return evaluate(window.center(), mark) * window.area();
}

namespace {
double linear_scale(const Window& w, const std::vector<LinearSurface>& s) {
  double m = 0.0;
  for (const auto& f : s) {
    for (double x : {w.xmin(), w.xmax()}) {
      for (double y : {w.ymin(), w.ymax()}) m = std::max(m, f.a + f.bx * x + f.by * y);
    }
  }
  return m;
}
}  // namespace

LinearIntensity::LinearIntensity(Window domain, std::vector<LinearSurface> surfaces)
    : IntensityModel(domain, intensity_floor(linear_scale(domain, surfaces))),
      surfaces_(std::move(surfaces)) {
  require(!surfaces_.empty(), "linear intensity needs one surface per mark");
}

double LinearIntensity::raw(Vec2 z, MarkIndex m) const {
  const auto& s = surfaces_.at(m);
  return std::max(0.0, s.a + s.bx * z.x + s.by * z.y);
}

bool LinearIntensity::torus_periodic() const {
  return std::all_of(surfaces_.begin(), surfaces_.end(),
                     [](const LinearSurface& s) { return s.bx == 0.0 && s.by == 0.0; });
}

FunctionIntensity::FunctionIntensity(Window domain, Fn fn, double floor, bool periodic)
    : IntensityModel(domain, floor), fn_(std::move(fn)), periodic_(periodic) {
  require(static_cast<bool>(fn_), "function intensity needs a callable");
}

double FunctionIntensity::raw(Vec2 z, MarkIndex m) const {
  return std::max(0.0, fn_(z, m));
}

// ---------------------------------------------------------------------------

KernelIntensity::KernelIntensity(std::span<const Vec2> locations, Window window,
                                 double sigma, KernelOptions options)
    : IntensityModel(window, intensity_floor(static_cast<double>(locations.size()) /
                                             window.area())),
      sigma_(sigma),
      options_(options),
      index_(window, locations, kCutoffSigmas * sigma),
      cutoff_(kCutoffSigmas * sigma) {
  require(!locations.empty(), "no data for intensity estimation");
  require(std::isfinite(sigma) && sigma > 0.0, "kernel bandwidth must be positive");
  require(options_.raster_n > 0, "raster resolution must be positive");
  for (const Vec2& p : locations) {
    require(window.contains(p), "kernel data location outside the window");
  }
  raster_.reserve(static_cast<std::size_t>(options_.raster_n) * options_.raster_n);
  for_each_midpoint(window, options_.raster_n,
                    [&](Vec2 z) { raster_.push_back(raw(z, 0)); });
}

double KernelIntensity::density_sum(Vec2 z) const {
  const double inv2s2 = 1.0 / (2.0 * sigma_ * sigma_);
  const double norm = 1.0 / (2.0 * std::numbers::pi * sigma_ * sigma_);
  const auto& locs = index_.locations();
  double sum = 0.0;
  auto add = [&](std::size_t i, double d2) {
    if (options_.leave_one_out && locs[i] == z) return;
    sum += std::exp(-d2 * inv2s2);
  };

  if (options_.edge == EdgeCorrection::local) {
    index_.for_each_within(z, cutoff_, [&](std::size_t i) { add(i, squared_distance(locs[i], z)); });
    return norm * sum;
  }

  const Window& w = domain();
  if (2.0 * cutoff_ < std::min(w.width(), w.height())) {
    // Balls around the nine images are disjoint, so each point is seen once.
    const Vec2 base = w.wrap(z);
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        const Vec2 c{base.x + i * w.width(), base.y + j * w.height()};
        index_.for_each_within(c, cutoff_, [&](std::size_t k) {
          add(k, squared_distance(locs[k], c));
        });
      }
    }
  } else {
    for (std::size_t k = 0; k < locs.size(); ++k) {
      const double d = torus_distance(w, w.wrap(z), locs[k]);
      add(k, d * d);
    }
  }
  return norm * sum;
}

double KernelIntensity::window_mass(Vec2 z) const {
  const Window& w = domain();
  const double px = normal_cdf((w.xmax() - z.x) / sigma_) - normal_cdf((w.xmin() - z.x) / sigma_);
  const double py = normal_cdf((w.ymax() - z.y) / sigma_) - normal_cdf((w.ymin() - z.y) / sigma_);
  return px * py;
}

double KernelIntensity::raw(Vec2 z, MarkIndex) const {
  const double s = density_sum(z);
  if (options_.edge == EdgeCorrection::torus) return s;
  const double mass = window_mass(z);
  return mass > 0.0 ? s / mass : 0.0;
}

double KernelIntensity::integral(MarkIndex mark, const Window& window, int raster_n) const {
  if (window == domain() && raster_n == options_.raster_n) {
    double sum = 0.0;
    for (double v : raster_) sum += std::max(v, floor());
    return sum * window.area() / (static_cast<double>(raster_n) * raster_n);
  }
  return IntensityModel::integral(mark, window, raster_n);
}

KernelIntensity kernel_estimate(std::span<const Vec2> locations, const Window& window,
                                double sigma, KernelOptions options) {
  return KernelIntensity(locations, window, sigma, options);
}

double bandwidth_rule(const Window& window, double fraction) {
  return fraction * std::sqrt(window.area());
}

// ---------------------------------------------------------------------------

namespace {
const ModelPtr& first_component(const std::vector<ModelPtr>& c) {
  require(!c.empty() && c.front(), "per-mark intensity needs components");
  return c.front();
}
double min_floor(const std::vector<ModelPtr>& c) {
  double f = std::numeric_limits<double>::infinity();
  for (const auto& m : c) {
    require(static_cast<bool>(m), "null intensity component");
    f = std::min(f, m->floor());
  }
  return f;
}
}  // namespace

PerMarkIntensity::PerMarkIntensity(std::vector<ModelPtr> components)
    : IntensityModel(first_component(components)->domain(), min_floor(components)),
      components_(std::move(components)) {}

double PerMarkIntensity::raw(Vec2 z, MarkIndex m) const {
  require(m < components_.size(), "mark has no intensity component");
  return components_[m]->evaluate(z, 0);
}

double PerMarkIntensity::integral(MarkIndex mark, const Window& window, int raster_n) const {
  require(mark < components_.size(), "mark has no intensity component");
  return components_[mark]->integral(0, window, raster_n);
}

bool PerMarkIntensity::torus_periodic() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ModelPtr& m) { return m->torus_periodic(); });
}

namespace {
const ModelPtr& checked(const ModelPtr& m) {
  require(static_cast<bool>(m), "null base intensity");
  return m;
}
}  // namespace

ScaledIntensity::ScaledIntensity(ModelPtr base, double scale)
    : IntensityModel(checked(base)->domain(), base->floor() * scale),
      base_(std::move(base)),
      scale_(scale) {
  require(std::isfinite(scale) && scale > 0.0, "intensity scale must be positive");
}

MarkAgnosticIntensity::MarkAgnosticIntensity(ModelPtr base, MarkIndex base_mark)
    : IntensityModel(checked(base)->domain(), base->floor()),
      base_(std::move(base)),
      base_mark_(base_mark) {}

TranslatedIntensity::TranslatedIntensity(ModelPtr base, Vec2 shift, MarkSet translated)
    : IntensityModel(checked(base)->domain(), base->floor()),
      base_(std::move(base)),
      shift_(shift),
      translated_(std::move(translated)) {}

double TranslatedIntensity::raw(Vec2 z, MarkIndex m) const {
  if (!translated_.contains(m)) return base_->raw(z, m);
  return base_->raw(domain().wrap(z - shift_), m);
}

// ---------------------------------------------------------------------------

double lower_bound(const IntensityModel& model, const MarkSet& marks,
                   const Window& window, int grid_n, std::span<const Vec2> data,
                   Vec2 grid_shift) {
  require(!marks.empty(), "lower bound needs a non-empty mark set");
  require(grid_n > 0, "lower bound grid must be positive");
  const bool shifted = grid_shift.x != 0.0 || grid_shift.y != 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](Vec2 z) {
    for (MarkIndex m : marks) best = std::min(best, model.evaluate(z, m));
  };
  if (grid_n == 1) {
    visit(shifted ? window.wrap(window.center() + grid_shift) : window.center());
  } else {
    const double dx = window.width() / (grid_n - 1);
    const double dy = window.height() / (grid_n - 1);
    for (int j = 0; j < grid_n; ++j) {
      const double y = j + 1 == grid_n ? window.ymax() : window.ymin() + j * dy;
      for (int i = 0; i < grid_n; ++i) {
        const double x = i + 1 == grid_n ? window.xmax() : window.xmin() + i * dx;
        const Vec2 g{x, y};
        visit(shifted ? window.wrap(g + grid_shift) : g);
      }
    }
  }
  for (const Vec2& z : data) visit(z);
  return std::max(best, model.floor());
}

double lower_bound(const IntensityModel& model, const MarkSet& marks,
                   const MarkedPattern& pattern, int grid_n) {
  const auto locs = pattern.locations(marks);
  return lower_bound(model, marks, pattern.window(), grid_n, locs);
}

double total_mass(const IntensityModel& model, const MarkSpace& marks,
                  const Window& window, int raster_n) {
  double mass = 0.0;
  for (MarkIndex m = 0; m < marks.size(); ++m) {
    mass += marks.weight(m) * model.integral(m, window, raster_n);
  }
  return mass;
}

double scale_from_mass(std::size_t n, double mass) {
  require(std::isfinite(mass) && mass > 0.0,
          "intensity integral must be positive to fit a scale", ErrorCode::numeric);
  return static_cast<double>(n) / mass;
}

double fit_scale(const IntensityModel& base, const MarkedPattern& pattern, int raster_n) {
  const MarkSpace& marks = pattern.markspace();
  const double mass = total_mass(base, marks, pattern.window(), raster_n);
  // A surface that is zero everywhere integrates to the floor alone.
  double floor_mass = 0.0;
  for (double w : marks.weights()) floor_mass += w * base.floor() * pattern.window().area();
  require(mass > floor_mass * (1.0 + 1e-9), "intensity integral is zero; cannot fit a scale",
          ErrorCode::numeric);
  return scale_from_mass(pattern.size(), mass);
}

}  // namespace mpstat
