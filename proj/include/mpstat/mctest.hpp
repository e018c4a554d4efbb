// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpstat/estimators.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/marks.hpp"
#include "mpstat/pattern.hpp"

namespace mpstat {

struct MonteCarloOptions {
  int replicates = 99;
  int rank = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0 = hardware concurrency
  int probe_n = 64;
  int lower_bound_grid = 128;
  double tol_den = 1e-3;
};

/// Pointwise rank envelopes of a statistic over null replicates.
struct EnvelopeResult {
  std::string test;
  Statistic statistic = Statistic::J;
  RGrid rgrid{std::vector<double>{0.0}};
  MarkSet from;
  MarkSet to;
  double lambda_bar = 0.0;
  Curve observed;
  Curve lower;  ///< rank-th smallest replicate value
  Curve upper;  ///< rank-th largest replicate value
  Curve mean;
  std::vector<std::size_t> n_effective;  ///< replicates defined at each r
  int rank = 5;
  int replicates = 99;
  std::uint64_t seed = 0;

  /// Observed value strictly outside [lower, upper] at index k.
  bool rejects(std::size_t k) const;
};

/// Envelopes from replicate curves; replicates undefined at an r are skipped
/// there. An r with fewer than 2 * rank defined replicates gets no envelope.
EnvelopeResult build_envelope(Curve observed, const std::vector<Curve>& replicates,
                              int rank);

/// Random-labelling test: the marks of `pattern` are permuted uniformly over
/// the fixed locations. The model is lambda(z, m) = ground(z) with nu set to
/// the empirical mark distribution, and the statistic (D or J) is computed
/// from C to the whole mark space.
EnvelopeResult test_random_labelling(const MarkedPattern& pattern, ModelPtr ground,
                                     const MarkSet& from, Statistic statistic,
                                     const RGrid& rgrid, const MonteCarloOptions& options);

/// D-marked points of `pattern` shifted over the torus by `shift`.
MarkedPattern translate_component(const MarkedPattern& pattern, const MarkSet& marks,
                                  Vec2 shift);

/// Lotwick-Silverman style independence test: the D component and its
/// intensity are torus-translated by a uniform vector, C stays fixed. The
/// model must be torus periodic (torus-corrected kernels or constants).
EnvelopeResult test_independence_ls(const MarkedPattern& pattern, ModelPtr model,
                                    const MarkSet& from, const MarkSet& to,
                                    Statistic statistic, const RGrid& rgrid,
                                    const MonteCarloOptions& options);

}  // namespace mpstat
