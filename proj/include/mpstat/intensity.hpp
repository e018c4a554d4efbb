// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mpstat/geometry.hpp"
#include "mpstat/marks.hpp"
#include "mpstat/neighbor_index.hpp"
#include "mpstat/pattern.hpp"

namespace mpstat {

/// Intensity function lambda(z, m) with respect to Lebesgue x nu.
///
/// Subclasses provide the raw surface; evaluate() floors it at a strictly
/// positive epsilon so reweighting never divides by zero. Models are
/// immutable and safe to share between threads.
class IntensityModel {
 public:
  IntensityModel(Window domain, double floor);
  virtual ~IntensityModel() = default;

  double evaluate(Vec2 z, MarkIndex m) const {
    const double v = raw(z, m);
    return v > floor_ ? v : floor_;
  }

  /// Unfloored surface value, >= 0.
  virtual double raw(Vec2 z, MarkIndex m) const = 0;

  /// Midpoint-rule integral of evaluate(., mark) over `window` on an n x n raster.
  virtual double integral(MarkIndex mark, const Window& window, int raster_n) const;

  /// True when the surface is periodic on the domain torus, which is what a
  /// torus translation test needs.
  virtual bool torus_periodic() const { return false; }

  const Window& domain() const { return domain_; }
  double floor() const { return floor_; }

 private:
  Window domain_;
  double floor_;
};

using ModelPtr = std::shared_ptr<const IntensityModel>;

/// 1e-10 x scale, or the smallest normal double when scale is not positive.
double intensity_floor(double scale);

class ConstantIntensity final : public IntensityModel {
 public:
  /// One value per mark.
  ConstantIntensity(Window domain, std::vector<double> values);

  double raw(Vec2, MarkIndex m) const override { return values_.at(m); }
  double integral(MarkIndex mark, const Window& window, int raster_n) const override;
  bool torus_periodic() const override { return true; }

 private:
  std::vector<double> values_;
};

/// max(0, a + bx * x + by * y) per mark.
struct LinearSurface {
  double a = 0.0;
  double bx = 0.0;
  double by = 0.0;
};

class LinearIntensity final : public IntensityModel {
 public:
  LinearIntensity(Window domain, std::vector<LinearSurface> surfaces);

  double raw(Vec2 z, MarkIndex m) const override;
  bool torus_periodic() const override;
  const std::vector<LinearSurface>& surfaces() const { return surfaces_; }

 private:
  std::vector<LinearSurface> surfaces_;
};

class FunctionIntensity final : public IntensityModel {
 public:
  using Fn = std::function<double(Vec2, MarkIndex)>;
  FunctionIntensity(Window domain, Fn fn, double floor, bool periodic = false);

  double raw(Vec2 z, MarkIndex m) const override;
  bool torus_periodic() const override { return periodic_; }

 private:
  Fn fn_;
  bool periodic_;
};

enum class EdgeCorrection {
  torus,  ///< kernel evaluated at the flat-torus distance
  local,  ///< divided by the kernel mass inside the window at the evaluation point
};

struct KernelOptions {
  EdgeCorrection edge = EdgeCorrection::torus;
  /// Data locations coinciding with the evaluation point are skipped.
  bool leave_one_out = false;
  /// Cached raster resolution used for integrals and export.
  int raster_n = 128;
};

/// Isotropic Gaussian kernel estimate built from a set of locations. The
/// surface ignores the mark argument; combine with PerMarkIntensity for
/// per-mark estimates.
class KernelIntensity final : public IntensityModel {
 public:
  KernelIntensity(std::span<const Vec2> locations, Window window, double sigma,
                  KernelOptions options = {});

  double raw(Vec2 z, MarkIndex m) const override;
  double integral(MarkIndex mark, const Window& window, int raster_n) const override;
  bool torus_periodic() const override { return options_.edge == EdgeCorrection::torus; }

  double sigma() const { return sigma_; }
  const KernelOptions& options() const { return options_; }
  std::size_t size() const { return index_.size(); }
  /// Row-major midpoint raster of raw values, raster_n x raster_n.
  const std::vector<double>& raster() const { return raster_; }

 private:
  double density_sum(Vec2 z) const;
  double window_mass(Vec2 z) const;

  double sigma_;
  KernelOptions options_;
  NeighborIndex index_;
  double cutoff_;
  std::vector<double> raster_;
};

KernelIntensity kernel_estimate(std::span<const Vec2> locations, const Window& window,
                                double sigma, KernelOptions options = {});

/// 0.10 x sqrt(area), the square-root-of-area bandwidth rule.
double bandwidth_rule(const Window& window, double fraction = 0.10);

/// Dispatches mark m to component m, evaluated at mark 0.
class PerMarkIntensity final : public IntensityModel {
 public:
  explicit PerMarkIntensity(std::vector<ModelPtr> components);

  double raw(Vec2 z, MarkIndex m) const override;
  double integral(MarkIndex mark, const Window& window, int raster_n) const override;
  bool torus_periodic() const override;
  std::size_t size() const { return components_.size(); }

 private:
  std::vector<ModelPtr> components_;
};

/// c x base, floor included.
class ScaledIntensity final : public IntensityModel {
 public:
  ScaledIntensity(ModelPtr base, double scale);

  double raw(Vec2 z, MarkIndex m) const override { return scale_ * base_->raw(z, m); }
  double integral(MarkIndex mark, const Window& window, int raster_n) const override {
    return scale_ * base_->integral(mark, window, raster_n);
  }
  bool torus_periodic() const override { return base_->torus_periodic(); }
  double scale() const { return scale_; }
  const ModelPtr& base() const { return base_; }

 private:
  ModelPtr base_;
  double scale_;
};

/// lambda(z, m) = base(z, base_mark) for every m: a factorised model
/// lambda_g(z) used under random labelling.
class MarkAgnosticIntensity final : public IntensityModel {
 public:
  explicit MarkAgnosticIntensity(ModelPtr base, MarkIndex base_mark = 0);

  double raw(Vec2 z, MarkIndex) const override { return base_->raw(z, base_mark_); }
  double integral(MarkIndex, const Window& window, int raster_n) const override {
    return base_->integral(base_mark_, window, raster_n);
  }
  bool torus_periodic() const override { return base_->torus_periodic(); }

 private:
  ModelPtr base_;
  MarkIndex base_mark_;
};

/// Torus translation of base by `shift` for the marks in `translated`:
/// evaluate(z, m) = base(wrap(z - shift), m). Other marks are unchanged.
class TranslatedIntensity final : public IntensityModel {
 public:
  TranslatedIntensity(ModelPtr base, Vec2 shift, MarkSet translated);

  double raw(Vec2 z, MarkIndex m) const override;
  bool torus_periodic() const override { return base_->torus_periodic(); }
  Vec2 shift() const { return shift_; }

 private:
  ModelPtr base_;
  Vec2 shift_;
  MarkSet translated_;
};

/// Numerical infimum of lambda over marks in `marks`: minimum of evaluate
/// over a grid_n x grid_n lattice spanning the closed window (boundary
/// included), over `data` locations, and over every mark in the set. When
/// grid_shift is non-zero the lattice is torus-shifted by it.
double lower_bound(const IntensityModel& model, const MarkSet& marks,
                   const Window& window, int grid_n,
                   std::span<const Vec2> data = {}, Vec2 grid_shift = {});

/// Same, with the window of `pattern` and the locations of its points whose
/// mark lies in `marks`.
double lower_bound(const IntensityModel& model, const MarkSet& marks,
                   const MarkedPattern& pattern, int grid_n);

/// Total nu-weighted mass  sum_m nu(m) * integral of lambda(., m) over window.
double total_mass(const IntensityModel& model, const MarkSpace& marks,
                  const Window& window, int raster_n = 128);

/// Mass-preserving scale: n / total mass.
double scale_from_mass(std::size_t n, double mass);

/// Mass-preserving scale for a base model given the analysed pattern.
double fit_scale(const IntensityModel& base, const MarkedPattern& pattern,
                 int raster_n = 128);

}  // namespace mpstat
