// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpstat/geometry.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/marks.hpp"
#include "mpstat/pattern.hpp"

namespace mpstat {

/// Strictly increasing, nonnegative distances.
class RGrid {
 public:
  explicit RGrid(std::vector<double> values);
  /// count equally spaced values from 0 to rmax inclusive.
  static RGrid linspace(double rmax, std::size_t count);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double max() const { return values_.back(); }
  const std::vector<double>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const RGrid&, const RGrid&) = default;

 private:
  std::vector<double> values_;
};

/// Finite set of probe locations for the empty space estimator.
struct ProbeGrid {
  std::vector<Vec2> points;

  /// Midpoints of an m x m partition of the window.
  static ProbeGrid lattice(const Window& window, int m);
};

/// A per-r curve; nullopt marks an r where the value is undefined.
using Curve = std::vector<std::optional<double>>;

enum class Statistic { F, D, J, K };

std::string to_string(Statistic s);
Statistic statistic_from_string(const std::string& name);

struct SummaryOptions {
  int probe_n = 64;
  int lower_bound_grid = 128;
  /// J is reported only where 1 - F exceeds this.
  double tol_den = 1e-3;
};

struct SummaryEstimate {
  RGrid rgrid{std::vector<double>{0.0}};
  MarkSet from;  ///< C
  MarkSet to;    ///< D
  double lambda_bar = 0.0;
  Curve F, D, J, K;
  std::vector<double> normalizer;     ///< Hamilton normaliser per r
  std::vector<std::size_t> n_ref;     ///< C points inside the eroded window
  std::vector<std::size_t> n_probe;   ///< probes inside the eroded window
};

// The functions below take lambda_bar explicitly so callers can share a single
// bound between F and D, which the ratio J relies on.

/// 1 - mean over probes in W(-r) of prod over D points in B(l, r) of
/// (1 - lambda_bar / lambda).
Curve estimate_F(const MarkedPattern& pattern, const IntensityModel& model,
                 const MarkSet& to, double lambda_bar, const RGrid& rgrid,
                 const ProbeGrid& probes);

/// Raw reweighted sum over C points in W(-r) of 1/lambda(a) times the product
/// over the other D points within r. Zero at r where no C point qualifies.
std::vector<double> estimate_D_raw(const MarkedPattern& pattern,
                                   const IntensityModel& model, const MarkSet& from,
                                   const MarkSet& to, double lambda_bar,
                                   const RGrid& rgrid);

/// Sum of 1/lambda over C points in W(-r), estimating |W(-r)| nu(C).
std::vector<double> hamilton_normalizer(const MarkedPattern& pattern,
                                        const IntensityModel& model,
                                        const MarkSet& from, const RGrid& rgrid);

/// 1 - raw / normaliser; undefined where the normaliser is zero.
Curve estimate_D(const MarkedPattern& pattern, const IntensityModel& model,
                 const MarkSet& from, const MarkSet& to, double lambda_bar,
                 const RGrid& rgrid);

Curve estimate_J(const MarkedPattern& pattern, const IntensityModel& model,
                 const MarkSet& from, const MarkSet& to, double lambda_bar,
                 const RGrid& rgrid, const ProbeGrid& probes, double tol_den = 1e-3);

/// Minus-sampling cross K with inverse-intensity pair weights, normalised by
/// |W(-r)| nu(C) nu(D).
Curve estimate_K(const MarkedPattern& pattern, const IntensityModel& model,
                 const MarkSet& from, const MarkSet& to, const RGrid& rgrid);

/// (1 - D) / (1 - F) where defined.
Curve j_from_components(const Curve& d, const Curve& f, double tol_den);

/// All four statistics with one shared lambda_bar computed by lower_bound.
SummaryEstimate summarize(const MarkedPattern& pattern, const IntensityModel& model,
                          const MarkSet& from, const MarkSet& to, const RGrid& rgrid,
                          const SummaryOptions& options = {});

/// One statistic with an explicit lambda_bar; used by the Monte Carlo tests.
Curve evaluate_statistic(Statistic statistic, const MarkedPattern& pattern,
                         const IntensityModel& model, const MarkSet& from,
                         const MarkSet& to, double lambda_bar, const RGrid& rgrid,
                         const ProbeGrid& probes, double tol_den = 1e-3);

}  // namespace mpstat
