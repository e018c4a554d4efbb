// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "mpstat/error.hpp"
#include "mpstat/neighbor_index.hpp"

namespace mpstat {

RGrid::RGrid(std::vector<double> values) : values_(std::move(values)) {
  require(!values_.empty(), "r grid must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require(std::isfinite(values_[i]) && values_[i] >= 0.0,
            "r grid values must be finite and nonnegative");
    if (i > 0) require(values_[i] > values_[i - 1], "r grid must be strictly increasing");
  }
}

RGrid RGrid::linspace(double rmax, std::size_t count) {
  require(count >= 2, "r grid needs at least two values");
  require(std::isfinite(rmax) && rmax > 0.0, "r grid maximum must be positive");
  std::vector<double> v(count);
  const double step = rmax / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) v[i] = step * static_cast<double>(i);
  v.back() = rmax;
  return RGrid(std::move(v));
}

ProbeGrid ProbeGrid::lattice(const Window& window, int m) {
  require(m > 0, "probe lattice size must be positive");
  ProbeGrid g;
  g.points.reserve(static_cast<std::size_t>(m) * m);
  const double dx = window.width() / m;
  const double dy = window.height() / m;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      g.points.push_back({window.xmin() + (i + 0.5) * dx, window.ymin() + (j + 0.5) * dy});
    }
  }
  return g;
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::F: return "F";
    case Statistic::D: return "D";
    case Statistic::J: return "J";
    case Statistic::K: return "K";
  }
  return "?";
}

Statistic statistic_from_string(const std::string& name) {
  if (name == "F") return Statistic::F;
  if (name == "D") return Statistic::D;
  if (name == "J") return Statistic::J;
  if (name == "K") return Statistic::K;
  fail(ErrorCode::config, "unknown statistic '" + name + "' (expected F, D, J or K)");
}

namespace {

// Intensities are evaluated once per point; every estimator works from these.
struct Prepared {
  Prepared(const MarkedPattern& p, const IntensityModel& model) : pattern(p), index(p) {
    lambda.reserve(p.size());
    for (const auto& pt : p.points()) {
      const double v = model.evaluate(pt.location, pt.mark);
      require(std::isfinite(v) && v > 0.0, "intensity must be finite and positive at data points",
              ErrorCode::numeric);
      lambda.push_back(v);
    }
  }

  const MarkedPattern& pattern;
  NeighborIndex index;
  std::vector<double> lambda;
};

// r values whose eroded window is non-empty.
std::vector<bool> usable(const Window& w, const RGrid& rgrid) {
  std::vector<bool> ok(rgrid.size());
  for (std::size_t k = 0; k < rgrid.size(); ++k) ok[k] = erode(w, rgrid[k]).has_value();
  return ok;
}

struct Neighbour {
  double d2;
  std::size_t index;
};

void sort_neighbours(std::vector<Neighbour>& nb) {
  std::sort(nb.begin(), nb.end(), [](const Neighbour& a, const Neighbour& b) {
    return a.d2 != b.d2 ? a.d2 < b.d2 : a.index < b.index;
  });
}

// Factor 1 - lambda_bar / lambda with the runtime bound check. The slack
// absorbs rounding from torus wrapping of the evaluation point.
double thinning_factor(double lambda_bar, double lambda) {
  if (lambda_bar > lambda * (1.0 + 1e-12)) {
    fail(ErrorCode::numeric,
         "intensity lower bound exceeds the intensity at a data point; "
         "the bound must be an infimum");
  }
  return std::max(0.0, 1.0 - lambda_bar / lambda);
}

struct ReferenceSums {
  std::vector<double> raw;
  std::vector<double> normalizer;
  std::vector<double> pair;
  std::vector<std::size_t> n_ref;
};

ReferenceSums reference_sums(const Prepared& prep, const MarkSet& from, const MarkSet& to,
                             double lambda_bar, const RGrid& rgrid, bool need_product) {
  const std::size_t nr = rgrid.size();
  ReferenceSums s{std::vector<double>(nr, 0.0), std::vector<double>(nr, 0.0),
                  std::vector<double>(nr, 0.0), std::vector<std::size_t>(nr, 0)};
  const Window& w = prep.pattern.window();
  const auto ok = usable(w, rgrid);
  const double rmax = rgrid.max();
  const auto& pts = prep.pattern.points();
  std::vector<Neighbour> nb;

  for (std::size_t a = 0; a < pts.size(); ++a) {
    if (!from.contains(pts[a].mark)) continue;
    const Vec2 za = pts[a].location;
    const double reach = w.boundary_distance(za);
    if (reach < rgrid[0]) continue;

    nb.clear();
    prep.index.for_each_within(za, rmax, [&](std::size_t j) {
      if (j != a && to.contains(pts[j].mark)) nb.push_back({squared_distance(za, pts[j].location), j});
    });
    sort_neighbours(nb);

    const double inv_a = 1.0 / prep.lambda[a];
    double prod = 1.0;
    double inv_sum = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < nr; ++k) {
      const double r = rgrid[k];
      if (r > reach) break;
      const double r2 = r * r;
      while (next < nb.size() && nb[next].d2 <= r2) {
        const double lj = prep.lambda[nb[next].index];
        if (need_product) prod *= thinning_factor(lambda_bar, lj);
        inv_sum += 1.0 / lj;
        ++next;
      }
      if (!ok[k]) continue;
      s.raw[k] += inv_a * prod;
      s.normalizer[k] += inv_a;
      s.pair[k] += inv_a * inv_sum;
      ++s.n_ref[k];
    }
  }
  return s;
}

// Keeps probes off the data so the closed ball at r = 0 stays empty.
Vec2 nudge_off_data(Vec2 l, const Prepared& prep, const Window& w) {
  const auto& locs = prep.index.locations();
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool hit = false;
    prep.index.for_each_within(l, 0.0, [&](std::size_t j) { hit = hit || locs[j] == l; });
    if (!hit) return l;
    const double toward = l.x < w.center().x ? w.xmax() : w.xmin();
    l.x = std::nextafter(l.x, toward);
  }
  return l;
}

struct EmptySpace {
  Curve F;
  std::vector<std::size_t> n_probe;
};

EmptySpace empty_space(const Prepared& prep, const MarkSet& to, double lambda_bar,
                       const RGrid& rgrid, const ProbeGrid& probes) {
  const std::size_t nr = rgrid.size();
  const Window& w = prep.pattern.window();
  const auto ok = usable(w, rgrid);
  const double rmax = rgrid.max();
  const auto& pts = prep.pattern.points();
  std::vector<double> sum(nr, 0.0);
  std::vector<std::size_t> count(nr, 0);
  std::vector<Neighbour> nb;

  for (Vec2 l : probes.points) {
    require(w.contains(l), "probe location outside the window");
    l = nudge_off_data(l, prep, w);
    const double reach = w.boundary_distance(l);
    if (reach < rgrid[0]) continue;
    nb.clear();
    prep.index.for_each_within(l, rmax, [&](std::size_t j) {
      if (to.contains(pts[j].mark)) nb.push_back({squared_distance(l, pts[j].location), j});
    });
    sort_neighbours(nb);

    double prod = 1.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < nr; ++k) {
      const double r = rgrid[k];
      if (r > reach) break;
      const double r2 = r * r;
      while (next < nb.size() && nb[next].d2 <= r2) {
        prod *= thinning_factor(lambda_bar, prep.lambda[nb[next].index]);
        ++next;
      }
      if (!ok[k]) continue;
      sum[k] += prod;
      ++count[k];
    }
  }

  EmptySpace out{Curve(nr), count};
  for (std::size_t k = 0; k < nr; ++k) {
    if (count[k] > 0) out.F[k] = 1.0 - sum[k] / static_cast<double>(count[k]);
  }
  return out;
}

Curve d_from_sums(const ReferenceSums& s) {
  Curve d(s.raw.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (s.normalizer[k] > 0.0) d[k] = 1.0 - s.raw[k] / s.normalizer[k];
  }
  return d;
}

Curve k_from_sums(const ReferenceSums& s, const MarkedPattern& pattern, const MarkSet& from,
                  const MarkSet& to, const RGrid& rgrid) {
  const double nu = from.measure(pattern.markspace()) * to.measure(pattern.markspace());
  Curve k(rgrid.size());
  for (std::size_t i = 0; i < rgrid.size(); ++i) {
    if (auto e = erode(pattern.window(), rgrid[i])) k[i] = s.pair[i] / (e->area() * nu);
  }
  return k;
}

void check_marks(const MarkedPattern& p, const MarkSet& set, const char* what) {
  require(!set.empty(), std::string(what) + " mark set must not be empty");
  for (MarkIndex m : set) {
    require(m < p.markspace().size(), std::string(what) + " mark set outside the mark space");
  }
}

}  // namespace

Curve estimate_F(const MarkedPattern& pattern, const IntensityModel& model, const MarkSet& to,
                 double lambda_bar, const RGrid& rgrid, const ProbeGrid& probes) {
  check_marks(pattern, to, "D");
  require(lambda_bar > 0.0, "lambda_bar must be positive");
  Prepared prep(pattern, model);
  return empty_space(prep, to, lambda_bar, rgrid, probes).F;
}

std::vector<double> estimate_D_raw(const MarkedPattern& pattern, const IntensityModel& model,
                                   const MarkSet& from, const MarkSet& to, double lambda_bar,
                                   const RGrid& rgrid) {
  check_marks(pattern, from, "C");
  require(lambda_bar > 0.0, "lambda_bar must be positive");
  Prepared prep(pattern, model);
  return reference_sums(prep, from, to, lambda_bar, rgrid, true).raw;
}

std::vector<double> hamilton_normalizer(const MarkedPattern& pattern,
                                        const IntensityModel& model, const MarkSet& from,
                                        const RGrid& rgrid) {
  Prepared prep(pattern, model);
  if (from.empty()) return std::vector<double>(rgrid.size(), 0.0);
  check_marks(pattern, from, "C");
  return reference_sums(prep, from, MarkSet{}, 1.0, rgrid, false).normalizer;
}

Curve estimate_D(const MarkedPattern& pattern, const IntensityModel& model, const MarkSet& from,
                 const MarkSet& to, double lambda_bar, const RGrid& rgrid) {
  if (from.empty()) return Curve(rgrid.size());
  check_marks(pattern, from, "C");
  require(lambda_bar > 0.0, "lambda_bar must be positive");
  Prepared prep(pattern, model);
  return d_from_sums(reference_sums(prep, from, to, lambda_bar, rgrid, true));
}

Curve j_from_components(const Curve& d, const Curve& f, double tol_den) {
  require(d.size() == f.size(), "J: component curves differ in length");
  Curve j(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] && f[k] && 1.0 - *f[k] > tol_den) j[k] = (1.0 - *d[k]) / (1.0 - *f[k]);
  }
  return j;
}

Curve estimate_J(const MarkedPattern& pattern, const IntensityModel& model, const MarkSet& from,
                 const MarkSet& to, double lambda_bar, const RGrid& rgrid,
                 const ProbeGrid& probes, double tol_den) {
  check_marks(pattern, from, "C");
  check_marks(pattern, to, "D");
  require(lambda_bar > 0.0, "lambda_bar must be positive");
  Prepared prep(pattern, model);
  const Curve d = d_from_sums(reference_sums(prep, from, to, lambda_bar, rgrid, true));
  const Curve f = empty_space(prep, to, lambda_bar, rgrid, probes).F;
  return j_from_components(d, f, tol_den);
}

Curve estimate_K(const MarkedPattern& pattern, const IntensityModel& model, const MarkSet& from,
                 const MarkSet& to, const RGrid& rgrid) {
  check_marks(pattern, from, "C");
  check_marks(pattern, to, "D");
  Prepared prep(pattern, model);
  return k_from_sums(reference_sums(prep, from, to, 1.0, rgrid, false), pattern, from, to,
                     rgrid);
}

SummaryEstimate summarize(const MarkedPattern& pattern, const IntensityModel& model,
                          const MarkSet& from, const MarkSet& to, const RGrid& rgrid,
                          const SummaryOptions& options) {
  check_marks(pattern, from, "C");
  check_marks(pattern, to, "D");
  SummaryEstimate est;
  est.rgrid = rgrid;
  est.from = from;
  est.to = to;
  est.lambda_bar = lower_bound(model, to, pattern, options.lower_bound_grid);

  Prepared prep(pattern, model);
  const auto sums = reference_sums(prep, from, to, est.lambda_bar, rgrid, true);
  auto space = empty_space(prep, to, est.lambda_bar, rgrid,
                           ProbeGrid::lattice(pattern.window(), options.probe_n));
  est.F = std::move(space.F);
  est.n_probe = std::move(space.n_probe);
  est.D = d_from_sums(sums);
  est.J = j_from_components(est.D, est.F, options.tol_den);
  est.K = k_from_sums(sums, pattern, from, to, rgrid);
  est.normalizer = sums.normalizer;
  est.n_ref = sums.n_ref;
  return est;
}

Curve evaluate_statistic(Statistic statistic, const MarkedPattern& pattern,
                         const IntensityModel& model, const MarkSet& from, const MarkSet& to,
                         double lambda_bar, const RGrid& rgrid, const ProbeGrid& probes,
                         double tol_den) {
  switch (statistic) {
    case Statistic::F: return estimate_F(pattern, model, to, lambda_bar, rgrid, probes);
    case Statistic::D: return estimate_D(pattern, model, from, to, lambda_bar, rgrid);
    case Statistic::J:
      return estimate_J(pattern, model, from, to, lambda_bar, rgrid, probes, tol_den);
    case Statistic::K: return estimate_K(pattern, model, from, to, rgrid);
  }
  fail(ErrorCode::invalid_argument, "unknown statistic");
}

}  // namespace mpstat
