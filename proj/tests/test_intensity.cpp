// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mpstat/error.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/pattern.hpp"
#include "mpstat/rng.hpp"
#include "mpstat/simulate.hpp"

using namespace mpstat;

namespace {

const Window kUnit(0, 1, 0, 1);

double gauss(double d2, double sigma) {
  return std::exp(-0.5 * d2 / (sigma * sigma)) / (2.0 * std::numbers::pi * sigma * sigma);
}

std::vector<Vec2> random_points(Rng& rng, const Window& w, int n) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) v.push_back({rng.uniform(w.xmin(), w.xmax()), rng.uniform(w.ymin(), w.ymax())});
  return v;
}

}  // namespace

TEST_SUITE("intensity") {

TEST_CASE("floor is applied") {
  const ConstantIntensity c(kUnit, {5.0, 0.0});
  CHECK(c.evaluate({0.2, 0.3}, 0) == 5.0);
  CHECK(c.evaluate({0.2, 0.3}, 1) == doctest::Approx(5e-10));
  CHECK(c.evaluate({0.2, 0.3}, 1) > 0.0);
  const LinearIntensity l(kUnit, {{-1.0, 2.0, 0.0}});
  CHECK(l.raw({0.1, 0.0}, 0) == 0.0);
  CHECK(l.evaluate({0.1, 0.0}, 0) > 0.0);
  CHECK(l.evaluate({1.0, 0.0}, 0) == 1.0);
}

TEST_CASE("kernel requires data") {
  CHECK_THROWS_WITH_AS(KernelIntensity(std::vector<Vec2>{}, kUnit, 0.1, {}),
                       "no data for intensity estimation", Error);
  const std::vector<Vec2> one{{0.5, 0.5}};
  CHECK_THROWS_AS(KernelIntensity(one, kUnit, 0.0, {}), Error);
  CHECK_THROWS_AS(KernelIntensity(std::vector<Vec2>{{1.5, 0.5}}, kUnit, 0.1, {}), Error);
}

TEST_CASE("single kernel matches the Gaussian density") {
  const std::vector<Vec2> one{{0.5, 0.5}};
  const KernelIntensity k(one, kUnit, 0.08, {});
  for (Vec2 z : {Vec2{0.5, 0.5}, Vec2{0.6, 0.45}, Vec2{0.3, 0.7}}) {
    CHECK(k.evaluate(z, 0) == doctest::Approx(gauss(squared_distance(z, one[0]), 0.08)).epsilon(1e-12));
  }
  // min-image distance near an edge
  const std::vector<Vec2> edge{{0.02, 0.5}};
  const KernelIntensity ke(edge, kUnit, 0.05, {});
  CHECK(ke.evaluate({0.98, 0.5}, 0) == doctest::Approx(gauss(0.04 * 0.04, 0.05)).epsilon(1e-9));
}

TEST_CASE("one centred kernel integrates to one") {
  const std::vector<Vec2> one{{0.5, 0.5}};
  const KernelIntensity k(one, kUnit, 0.05, {});
  CHECK(k.integral(0, kUnit, 128) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("torus kernel conserves mass") {
  Rng rng(3);
  const Window w(0, 2, 0, 1);
  const auto pts = random_points(rng, w, 60);
  KernelOptions opts;
  opts.raster_n = 256;
  for (double sigma : {0.03, 0.08, 0.12}) {
    const KernelIntensity k(pts, w, sigma, opts);
    CAPTURE(sigma);
    CHECK(k.integral(0, w, 256) == doctest::Approx(60.0).epsilon(1e-3));
  }
}

TEST_CASE("torus kernel is translation equivariant") {
  Rng rng(8);
  const auto pts = random_points(rng, kUnit, 40);
  const KernelIntensity base(pts, kUnit, 0.07, {});
  for (int t = 0; t < 10; ++t) {
    const Vec2 v{rng.uniform(), rng.uniform()};
    std::vector<Vec2> shifted;
    for (Vec2 p : pts) shifted.push_back(kUnit.wrap(p + v));
    const KernelIntensity moved(shifted, kUnit, 0.07, {});
    for (int q = 0; q < 20; ++q) {
      const Vec2 z{rng.uniform(), rng.uniform()};
      CHECK(moved.evaluate(kUnit.wrap(z + v), 0) == doctest::Approx(base.evaluate(z, 0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("local edge correction removes boundary bias") {
  std::vector<Vec2> lattice;
  for (int j = 0; j < 100; ++j) {
    for (int i = 0; i < 100; ++i) lattice.push_back({(i + 0.5) / 100.0, (j + 0.5) / 100.0});
  }
  KernelOptions local;
  local.edge = EdgeCorrection::local;
  const KernelIntensity k(lattice, kUnit, 0.05, local);
  const double corner = k.evaluate({0.005, 0.005}, 0);
  const double centre = k.evaluate({0.5, 0.5}, 0);
  CHECK(corner / centre == doctest::Approx(1.0).epsilon(0.01));
  CHECK(centre == doctest::Approx(10000.0).epsilon(0.01));

  // Without the correction the corner sees about a quarter of the mass.
  double raw_corner = 0.0;
  for (Vec2 p : lattice) raw_corner += gauss(squared_distance(p, {0.005, 0.005}), 0.05);
  CHECK(raw_corner / centre == doctest::Approx(0.29).epsilon(0.05));
}

TEST_CASE("leave one out skips the coinciding location") {
  const std::vector<Vec2> two{{0.4, 0.5}, {0.6, 0.5}};
  KernelOptions loo;
  loo.leave_one_out = true;
  const KernelIntensity k(two, kUnit, 0.1, loo);
  CHECK(k.evaluate({0.4, 0.5}, 0) == doctest::Approx(gauss(0.04, 0.1)).epsilon(1e-12));
  const KernelIntensity full(two, kUnit, 0.1, {});
  CHECK(full.evaluate({0.4, 0.5}, 0) == doctest::Approx(gauss(0.0, 0.1) + gauss(0.04, 0.1)).epsilon(1e-12));
}

TEST_CASE("bandwidth rule") {
  CHECK(bandwidth_rule(Window(0, 400, 0, 100)) == doctest::Approx(20.0));
}

TEST_CASE("lower bound") {
  const ConstantIntensity five(kUnit, {5.0});
  CHECK(lower_bound(five, MarkSet{0}, kUnit, 16) == 5.0);

  const LinearIntensity ramp(kUnit, {{1.0, 1.0, 0.0}});
  CHECK(lower_bound(ramp, MarkSet{0}, kUnit, 101) == 1.0);

  const LinearIntensity bi(kUnit, {{3.0, 1.0, 0.0}, {50.0, 100.0, 0.0}});
  CHECK(lower_bound(bi, MarkSet{0}, kUnit, 33) == 3.0);
  CHECK(lower_bound(bi, MarkSet{1}, kUnit, 33) == 50.0);
  CHECK(lower_bound(bi, MarkSet{0, 1}, kUnit, 33) == 3.0);
  CHECK_THROWS_AS(lower_bound(bi, MarkSet{}, kUnit, 33), Error);

  // Data locations join the raster.
  const FunctionIntensity dip(
      kUnit, [](Vec2 z, MarkIndex) { return z == Vec2{0.3141, 0.2718} ? 0.5 : 2.0; }, 1e-9);
  const std::vector<Vec2> data{{0.3141, 0.2718}};
  CHECK(lower_bound(dip, MarkSet{0}, kUnit, 8) == 2.0);
  CHECK(lower_bound(dip, MarkSet{0}, kUnit, 8, data) == 0.5);
}

TEST_CASE("lower bound scales with the model") {
  Rng rng(21);
  const auto pts = random_points(rng, kUnit, 30);
  auto k = std::make_shared<KernelIntensity>(pts, kUnit, 0.1, KernelOptions{});
  const ScaledIntensity s(k, 3.5);
  const double lb = lower_bound(*k, MarkSet{0}, kUnit, 64);
  CHECK(lower_bound(s, MarkSet{0}, kUnit, 64) == doctest::Approx(3.5 * lb).epsilon(1e-14));
  CHECK(s.evaluate({0.3, 0.3}, 0) == doctest::Approx(3.5 * k->evaluate({0.3, 0.3}, 0)).epsilon(1e-14));
}

TEST_CASE("lower bound is torus invariant for torus kernels") {
  Rng rng(4);
  const auto pts = random_points(rng, kUnit, 25);
  auto k = std::make_shared<KernelIntensity>(pts, kUnit, 0.08, KernelOptions{});
  const double base = lower_bound(*k, MarkSet{0}, kUnit, 40);
  const Vec2 a{0.37, 0.81};
  const TranslatedIntensity t(k, a, MarkSet{0});
  const double dx = 1.0 / 39.0;
  CHECK(lower_bound(t, MarkSet{0}, kUnit, 40, {}, a) == doctest::Approx(base).epsilon(1e-9));
  // Translation by whole lattice steps needs no grid shift.
  const TranslatedIntensity t2(k, {3 * dx, 7 * dx}, MarkSet{0});
  CHECK(lower_bound(t2, MarkSet{0}, kUnit, 40, {}, {3 * dx, 7 * dx}) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("translated model") {
  const LinearIntensity l(kUnit, {{1.0, 2.0, 0.0}, {4.0, 0.0, 1.0}});
  auto base = std::make_shared<LinearIntensity>(l);
  const TranslatedIntensity t(base, {0.25, 0.0}, MarkSet{0});
  CHECK(t.evaluate({0.5, 0.5}, 0) == doctest::Approx(1.5));
  CHECK(t.evaluate({0.1, 0.5}, 0) == doctest::Approx(1.0 + 2.0 * 0.85));
  CHECK(t.evaluate({0.1, 0.5}, 1) == doctest::Approx(4.5));
  const TranslatedIntensity zero(base, {0.0, 0.0}, MarkSet{0, 1});
  CHECK(zero.evaluate({0.3, 0.2}, 0) == l.evaluate({0.3, 0.2}, 0));
}

TEST_CASE("per mark and mark agnostic composition") {
  auto a = std::make_shared<ConstantIntensity>(kUnit, std::vector<double>{2.0});
  auto b = std::make_shared<ConstantIntensity>(kUnit, std::vector<double>{7.0});
  const PerMarkIntensity pm({a, b});
  CHECK(pm.evaluate({0.1, 0.1}, 1) == 7.0);
  CHECK(pm.torus_periodic());
  const MarkAgnosticIntensity g(b);
  CHECK(g.evaluate({0.1, 0.1}, 3) == 7.0);
}

TEST_CASE("scale from mass") {
  CHECK(scale_from_mass(124, 3120.0) == doctest::Approx(124.0 / 3120.0).epsilon(1e-15));
  CHECK(std::round(scale_from_mass(124, 3120.0) * 1e4) / 1e4 == 0.0397);
  CHECK_THROWS_AS(scale_from_mass(5, 0.0), Error);
}

TEST_CASE("fit scale") {
  const Window w(0, 60, 0, 52);
  Rng rng(12);
  std::vector<MarkedPoint> pts;
  for (int i = 0; i < 124; ++i) pts.push_back({{rng.uniform(0, 60), rng.uniform(0, 52)}, 0});
  const MarkedPattern p(w, MarkSpace({"fire"}), pts);
  const ConstantIntensity one(w, {1.0});
  CHECK(total_mass(one, p.markspace(), w) == doctest::Approx(3120.0).epsilon(1e-14));
  const double c = fit_scale(one, p);
  CHECK(c == doctest::Approx(0.039743589743589).epsilon(1e-12));

  const ConstantIntensity zero(w, {0.0});
  CHECK_THROWS_AS(fit_scale(zero, p), Error);
}

TEST_CASE("doubling every weight halves the fitted scale") {
  std::vector<MarkedPoint> pts = {{{0.1, 0.2}, 0}, {{0.7, 0.3}, 1}, {{0.4, 0.9}, 1}};
  const MarkedPattern p(kUnit, MarkSpace({"a", "b"}, {1.0, 3.0}), pts);
  const MarkedPattern q = p.with_markspace(MarkSpace({"a", "b"}, {2.0, 6.0}));
  const ConstantIntensity c(kUnit, {4.0, 9.0});
  CHECK(fit_scale(c, q) == doctest::Approx(0.5 * fit_scale(c, p)).epsilon(1e-14));
}

TEST_CASE("fitted scale is unbiased for the generating intensity") {
  const Window w(0, 1, 0, 1);
  auto base = std::make_shared<LinearIntensity>(w, std::vector<LinearSurface>{{50.0, 100.0, 0.0}});
  const int reps = 200;
  double s = 0, s2 = 0;
  for (int i = 0; i < reps; ++i) {
    Rng rng(77, static_cast<std::uint64_t>(i));
    const auto locs = sim_poisson([&](Vec2 z) { return base->raw(z, 0); }, 150.0, w, rng);
    std::vector<MarkedPoint> pts;
    for (Vec2 z : locs) pts.push_back({z, 0});
    const double c = fit_scale(*base, MarkedPattern(w, MarkSpace({"1"}), pts));
    s += c;
    s2 += c * c;
  }
  const double mean = s / reps;
  const double se = std::sqrt((s2 / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

}  // TEST_SUITE
