// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/simulate.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mpstat/error.hpp"

namespace mpstat {

std::vector<Vec2> sim_poisson(const Surface& intensity, double lambda_max,
                              const Window& window, Rng& rng) {
  require(std::isfinite(lambda_max) && lambda_max >= 0.0,
          "thinning envelope must be finite and >= 0");
  std::vector<Vec2> out;
  const std::uint64_t n = rng.poisson(lambda_max * window.area());
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Vec2 z{rng.uniform(window.xmin(), window.xmax()),
                 rng.uniform(window.ymin(), window.ymax())};
    const double lam = intensity(z);
    if (lam > lambda_max) {
      fail(ErrorCode::numeric, "intensity " + std::to_string(lam) +
                                   " exceeds the thinning envelope " +
                                   std::to_string(lambda_max));
    }
    if (rng.uniform() * lambda_max < lam) out.push_back(z);
  }
  return out;
}

std::vector<Vec2> sim_poisson(const Surface& intensity, double lambda_max,
                              const Window& window, std::uint64_t seed) {
  Rng rng(seed);
  return sim_poisson(intensity, lambda_max, window, rng);
}

namespace {

MarkIndex draw_mark(Rng& rng, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(total > 0.0, "mark weights must have positive total");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    require(weights[m] >= 0.0, "mark weights must be non-negative");
    acc += weights[m];
    if (u < acc) return static_cast<MarkIndex>(m);
  }
  // Rounding at the top end.
  for (std::size_t m = weights.size(); m-- > 0;) {
    if (weights[m] > 0.0) return static_cast<MarkIndex>(m);
  }
  return 0;
}

}  // namespace

MarkedPattern sim_marked(const SimConfig& config) {
  require(static_cast<bool>(config.intensity), "simulation needs an intensity");
  Rng rng(config.seed, config.stream);
  const ModelPtr& model = config.intensity;
  std::vector<MarkedPoint> points;

  switch (config.rule) {
    case MarkingRule::independent_components: {
      for (MarkIndex m = 0; m < config.marks.size(); ++m) {
        auto locs = sim_poisson([&](Vec2 z) { return model->raw(z, m); }, config.lambda_max,
                                config.window, rng);
        for (const Vec2& z : locs) points.push_back({z, m});
      }
      break;
    }
    case MarkingRule::random_labelling: {
      require(config.label_probs.size() == config.marks.size(),
              "random labelling needs one probability per mark");
      auto locs = sim_poisson([&](Vec2 z) { return model->raw(z, 0); }, config.lambda_max,
                              config.window, rng);
      for (const Vec2& z : locs) points.push_back({z, draw_mark(rng, config.label_probs)});
      break;
    }
    case MarkingRule::independent_marking: {
      require(static_cast<bool>(config.mark_weights),
              "independent marking needs a location-dependent mark distribution");
      auto locs = sim_poisson([&](Vec2 z) { return model->raw(z, 0); }, config.lambda_max,
                              config.window, rng);
      for (const Vec2& z : locs) {
        auto w = config.mark_weights(z);
        require(w.size() == config.marks.size(), "mark distribution size mismatch");
        points.push_back({z, draw_mark(rng, w)});
      }
      break;
    }
  }
  // Continuous proposals: coincident locations have probability zero.
  return MarkedPattern(config.window, config.marks, std::move(points),
                       DuplicatePolicy::keep_first);
}

MarkedPattern sim_thomas_cross(const ThomasConfig& c) {
  require(c.kappa >= 0.0 && c.mu >= 0.0 && c.tau > 0.0,
          "Thomas process needs kappa, mu >= 0 and tau > 0");
  require(c.coupling >= 0.0 && c.coupling <= 1.0, "coupling must lie in [0, 1]");
  Rng rng(c.seed, c.stream);
  const double pad = 5.0 * c.tau;
  const Window& w = c.window;
  const Window dilated(w.xmin() - pad, w.xmax() + pad, w.ymin() - pad, w.ymax() + pad);
  auto homogeneous = [&](double rate) {
    return sim_poisson([rate](Vec2) { return rate; }, rate, dilated, rng);
  };

  const auto parents = homogeneous(c.kappa);
  std::vector<Vec2> parents_d;
  for (const Vec2& p : parents) {
    if (rng.uniform() < c.coupling) parents_d.push_back(p);
  }
  for (const Vec2& p : homogeneous(c.kappa * (1.0 - c.coupling))) parents_d.push_back(p);

  std::vector<MarkedPoint> points;
  auto scatter = [&](const std::vector<Vec2>& centres, MarkIndex mark) {
    for (const Vec2& p : centres) {
      const std::uint64_t n = rng.poisson(c.mu);
      for (std::uint64_t k = 0; k < n; ++k) {
        const Vec2 z{p.x + c.tau * rng.normal(), p.y + c.tau * rng.normal()};
        if (w.contains(z)) points.push_back({z, mark});
      }
    }
  };
  scatter(parents, 0);
  scatter(parents_d, 1);
  return MarkedPattern(w, MarkSpace({"1", "2"}), std::move(points),
                       DuplicatePolicy::keep_first);
}

}  // namespace mpstat
