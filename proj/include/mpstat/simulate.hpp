// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mpstat/geometry.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/marks.hpp"
#include "mpstat/pattern.hpp"
#include "mpstat/rng.hpp"

namespace mpstat {

using Surface = std::function<double(Vec2)>;

/// Inhomogeneous Poisson process by thinning a homogeneous one at rate
/// lambda_max. Throws if the surface exceeds lambda_max at a proposal.
std::vector<Vec2> sim_poisson(const Surface& intensity, double lambda_max,
                              const Window& window, Rng& rng);
std::vector<Vec2> sim_poisson(const Surface& intensity, double lambda_max,
                              const Window& window, std::uint64_t seed);

enum class MarkingRule {
  independent_components,  ///< superposition of independent per-mark Poisson processes
  independent_marking,     ///< Poisson ground, mark drawn from f_z at each location
  random_labelling,        ///< Poisson ground, mark drawn from a fixed f
};

struct SimConfig {
  Window window{0.0, 1.0, 0.0, 1.0};
  MarkSpace marks{{"1", "2"}};
  MarkingRule rule = MarkingRule::independent_components;
  /// Per-mark surfaces for independent components; the ground surface at
  /// mark 0 otherwise. Unfloored raw values are used.
  ModelPtr intensity;
  /// Envelope constant, >= sup of every surface.
  double lambda_max = 0.0;
  /// f for random labelling.
  std::vector<double> label_probs;
  /// f_z for independent marking: unnormalised non-negative weights per mark.
  std::function<std::vector<double>(Vec2)> mark_weights;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

MarkedPattern sim_marked(const SimConfig& config);

/// Bivariate Thomas cluster process in which the two marks share parents.
///
/// Parents are Poisson(kappa) on the window dilated by 5 tau. Mark 0
/// offspring cluster around every parent. Each parent is shared with mark 1
/// with probability `coupling`; mark 1 additionally uses independent
/// Poisson(kappa (1 - coupling)) parents so both marks have intensity
/// kappa * mu. Offspring are Poisson(mu) per parent with N(0, tau^2 I)
/// displacement; only those inside the window are kept.
struct ThomasConfig {
  Window window{0.0, 1.0, 0.0, 1.0};
  double kappa = 25.0;
  double mu = 4.0;
  double tau = 0.02;
  double coupling = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

MarkedPattern sim_thomas_cross(const ThomasConfig& config);

}  // namespace mpstat
