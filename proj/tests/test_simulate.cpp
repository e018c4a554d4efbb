// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "mpstat/error.hpp"
#include "mpstat/estimators.hpp"
#include "mpstat/simulate.hpp"

using namespace mpstat;

namespace {

const Window kUnit(0, 1, 0, 1);

struct Moments {
  double sum = 0, sum2 = 0;
  int n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt((sum2 / n - mean() * mean()) / (n - 1)); }
  bool near(double target, double k = 3.0) const { return std::abs(mean() - target) <= k * se(); }
};

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("zero intensity gives an empty pattern") {
  CHECK(sim_poisson([](Vec2) { return 0.0; }, 0.0, kUnit, 1).empty());
  CHECK(sim_poisson([](Vec2) { return 0.0; }, 10.0, kUnit, 1).empty());
}

TEST_CASE("envelope violations are reported") {
  CHECK_THROWS_AS(sim_poisson([](Vec2) { return 20.0; }, 10.0, kUnit, 1), Error);
}

TEST_CASE("homogeneous count") {
  Moments m;
  for (int i = 0; i < 1000; ++i) m.add(static_cast<double>(sim_poisson([](Vec2) { return 100.0; }, 100.0, kUnit, i).size()));
  CHECK(m.near(100.0));
}

TEST_CASE("linear ramp count and mean location") {
  Moments count, x;
  for (int i = 0; i < 1000; ++i) {
    const auto pts = sim_poisson([](Vec2 z) { return 200.0 * z.x; }, 200.0, kUnit, 5000 + i);
    count.add(static_cast<double>(pts.size()));
    for (Vec2 z : pts) x.add(z.x);
  }
  CHECK(count.near(100.0));
  CHECK(x.near(2.0 / 3.0));
}

TEST_CASE("counts in disjoint halves are uncorrelated") {
  const int reps = 1000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < reps; ++i) {
    const auto pts = sim_poisson([](Vec2) { return 80.0; }, 80.0, kUnit, 90000 + i);
    double a = 0, b = 0;
    for (Vec2 z : pts) (z.x < 0.5 ? a : b) += 1.0;
    sa += a;
    sb += b;
    sab += a * b;
    saa += a * a;
    sbb += b * b;
  }
  const double cov = sab / reps - (sa / reps) * (sb / reps);
  const double corr = cov / std::sqrt((saa / reps - sa * sa / reps / reps) * (sbb / reps - sb * sb / reps / reps));
  CHECK(std::abs(corr) < 3.0 / std::sqrt(reps));
}

TEST_CASE("random labelling marginals") {
  Moments c0, c1;
  for (int i = 0; i < 500; ++i) {
    SimConfig cfg;
    cfg.rule = MarkingRule::random_labelling;
    cfg.intensity = std::make_shared<ConstantIntensity>(kUnit, std::vector<double>{200.0});
    cfg.lambda_max = 200.0;
    cfg.label_probs = {0.5, 0.5};
    cfg.seed = 3;
    cfg.stream = static_cast<std::uint64_t>(i);
    const auto p = sim_marked(cfg);
    c0.add(static_cast<double>(p.count(MarkSet{0})));
    c1.add(static_cast<double>(p.count(MarkSet{1})));
  }
  CHECK(c0.near(100.0));
  CHECK(c1.near(100.0));
}

TEST_CASE("independent components match the colouring of the ground") {
  Moments comp, comp_var_proxy, label;
  for (int i = 0; i < 500; ++i) {
    SimConfig a;
    a.intensity = std::make_shared<ConstantIntensity>(kUnit, std::vector<double>{100.0, 100.0});
    a.lambda_max = 100.0;
    a.seed = 10;
    a.stream = static_cast<std::uint64_t>(i);
    const double n0 = static_cast<double>(sim_marked(a).count(MarkSet{0}));
    comp.add(n0);
    comp_var_proxy.add((n0 - 100.0) * (n0 - 100.0));

    SimConfig b = a;
    b.rule = MarkingRule::random_labelling;
    b.intensity = std::make_shared<ConstantIntensity>(kUnit, std::vector<double>{200.0});
    b.lambda_max = 200.0;
    b.label_probs = {0.5, 0.5};
    label.add(static_cast<double>(sim_marked(b).count(MarkSet{0})));
  }
  CHECK(comp.near(100.0));
  CHECK(label.near(100.0));
  CHECK(comp_var_proxy.near(100.0));
}

TEST_CASE("independent marking follows the location-dependent distribution") {
  Moments left, right;
  for (int i = 0; i < 200; ++i) {
    SimConfig cfg;
    cfg.rule = MarkingRule::independent_marking;
    cfg.intensity = std::make_shared<ConstantIntensity>(kUnit, std::vector<double>{200.0});
    cfg.lambda_max = 200.0;
    cfg.mark_weights = [](Vec2 z) { return std::vector<double>{z.x, 1.0 - z.x}; };
    cfg.seed = 4;
    cfg.stream = static_cast<std::uint64_t>(i);
    const auto sim = sim_marked(cfg);
    for (const auto& pt : sim.points()) (pt.mark == 0 ? left : right).add(pt.location.x);
  }
  CHECK(left.near(2.0 / 3.0));
  CHECK(right.near(1.0 / 3.0));
}

TEST_CASE("seed determinism") {
  SimConfig cfg;
  cfg.intensity = std::make_shared<LinearIntensity>(kUnit, std::vector<LinearSurface>{{10, 90, 0}, {100, 0, 0}});
  cfg.lambda_max = 100.0;
  cfg.seed = 123;
  const auto a = sim_marked(cfg);
  const auto b = sim_marked(cfg);
  CHECK(a.points() == b.points());
  cfg.seed = 124;
  CHECK(sim_marked(cfg).points() != a.points());
}

TEST_CASE("Thomas cross process") {
  ThomasConfig none;
  none.mu = 0.0;
  CHECK(sim_thomas_cross(none).empty());

  Moments m0, m1;
  for (int i = 0; i < 300; ++i) {
    ThomasConfig t;
    t.coupling = 0.6;
    t.seed = 55;
    t.stream = static_cast<std::uint64_t>(i);
    const auto p = sim_thomas_cross(t);
    m0.add(static_cast<double>(p.count(MarkSet{0})));
    m1.add(static_cast<double>(p.count(MarkSet{1})));
  }
  CHECK(m0.near(100.0));
  CHECK(m1.near(100.0));
}

TEST_CASE("shared parents pull J below one") {
  const RGrid g({0.02, 0.03, 0.04});
  std::vector<double> mean(g.size(), 0.0);
  const int reps = 200;
  for (int i = 0; i < reps; ++i) {
    ThomasConfig t;
    t.seed = 66;
    t.stream = static_cast<std::uint64_t>(i);
    const auto p = sim_thomas_cross(t);
    const ConstantIntensity lam(kUnit, {100.0, 100.0});
    const auto est = summarize(p, lam, MarkSet{0}, MarkSet{1}, g);
    for (std::size_t k = 0; k < g.size(); ++k) mean[k] += *est.J[k] / reps;
  }
  for (double v : mean) CHECK(v < 1.0);
}

}  // TEST_SUITE
