// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/mpstat.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpstat/error.hpp"
#include "mpstat/estimators.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/io.hpp"
#include "mpstat/mctest.hpp"
#include "mpstat/pattern.hpp"
#include "mpstat/run.hpp"
#include "mpstat/version.hpp"

struct mps_pattern {
  mpstat::MarkedPattern p;
};
struct mps_model {
  mpstat::ModelPtr m;
};
struct mps_estimate {
  mpstat::SummaryEstimate e;
};
struct mps_envelope {
  mpstat::EnvelopeResult e;
};

namespace {

thread_local std::string g_last_error;

mps_status set_error(mps_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <typename F>
mps_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MPS_OK;
  } catch (const mpstat::Error& e) {
    return set_error(static_cast<mps_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(MPS_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MPS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MPS_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* name) {
  mpstat::require(p != nullptr, std::string(name) + " must not be NULL");
}

mpstat::Window to_window(mps_window w) { return mpstat::Window(w.xmin, w.xmax, w.ymin, w.ymax); }

mpstat::MarkSet to_markset(const uint32_t* marks, size_t n) {
  if (n > 0) need(marks, "mark set");
  return mpstat::MarkSet(std::vector<mpstat::MarkIndex>(marks, marks + n));
}

mpstat::RGrid to_rgrid(const double* r, size_t n) {
  need(r, "r");
  return mpstat::RGrid(std::vector<double>(r, r + n));
}

std::vector<mpstat::Vec2> to_points(const double* xy, size_t n) {
  if (n > 0) need(xy, "xy");
  std::vector<mpstat::Vec2> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = {xy[2 * i], xy[2 * i + 1]};
  return v;
}

std::ofstream open_file(const char* path) {
  need(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out) mpstat::fail(mpstat::ErrorCode::io, std::string("cannot write '") + path + "'");
  return out;
}

double value_or_nan(const mpstat::Curve& c, size_t i) {
  return c[i] ? *c[i] : std::numeric_limits<double>::quiet_NaN();
}

mpstat::Statistic to_statistic(mps_statistic s) {
  switch (s) {
    case MPS_STAT_F: return mpstat::Statistic::F;
    case MPS_STAT_D: return mpstat::Statistic::D;
    case MPS_STAT_J: return mpstat::Statistic::J;
    case MPS_STAT_K: return mpstat::Statistic::K;
  }
  mpstat::fail(mpstat::ErrorCode::invalid_argument, "unknown statistic");
}

mpstat::MonteCarloOptions to_options(const mps_test_options* o) {
  const mps_test_options d = o ? *o : mps_test_options_default();
  mpstat::MonteCarloOptions opts;
  opts.replicates = d.replicates;
  opts.rank = d.rank;
  opts.seed = d.seed;
  opts.threads = d.threads;
  opts.probe_n = d.probe_n;
  return opts;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* mps_last_error(void) { return g_last_error.c_str(); }
const char* mps_version(void) { return mpstat::kVersion; }

mps_status mps_pattern_create(mps_window window, const char* const* labels, const double* weights,
                              size_t n_labels, const double* xy, const uint32_t* marks, size_t n,
                              int keep_first, mps_pattern** out) {
  return guarded([&] {
    need(out, "out");
    need(labels, "labels");
    if (n > 0) need(marks, "marks");
    std::vector<std::string> names;
    for (size_t i = 0; i < n_labels; ++i) {
      need(labels[i], "label");
      names.emplace_back(labels[i]);
    }
    mpstat::MarkSpace space = weights ? mpstat::MarkSpace(names, std::vector<double>(weights, weights + n_labels))
                                      : mpstat::MarkSpace(names);
    const auto locs = to_points(xy, n);
    std::vector<mpstat::MarkedPoint> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {locs[i], marks[i]};
    auto policy = keep_first ? mpstat::DuplicatePolicy::keep_first : mpstat::DuplicatePolicy::reject;
    *out = new mps_pattern{mpstat::MarkedPattern(to_window(window), std::move(space), std::move(pts), policy)};
  });
}

mps_status mps_pattern_read_csv(const char* path, mps_window window, mps_pattern** out) {
  return guarded([&] {
    need(out, "out");
    need(path, "path");
    mpstat::IngestConfig cfg;
    cfg.window = to_window(window);
    *out = new mps_pattern{mpstat::ingest(std::string(path), cfg).analysis};
  });
}

mps_status mps_pattern_write_csv(const mps_pattern* p, const char* path) {
  return guarded([&] {
    need(p, "pattern");
    auto f = open_file(path);
    mpstat::write_pattern_csv(f, p->p);
  });
}

size_t mps_pattern_size(const mps_pattern* p) { return p ? p->p.size() : 0; }
size_t mps_pattern_mark_count(const mps_pattern* p) { return p ? p->p.markspace().size() : 0; }

mps_status mps_pattern_point(const mps_pattern* p, size_t i, double* x, double* y, uint32_t* mark) {
  return guarded([&] {
    need(p, "pattern");
    mpstat::require(i < p->p.size(), "point index out of range");
    const auto& pt = p->p[i];
    if (x) *x = pt.location.x;
    if (y) *y = pt.location.y;
    if (mark) *mark = pt.mark;
  });
}

void mps_pattern_destroy(mps_pattern* p) { delete p; }

mps_status mps_model_constant(mps_window domain, const double* values, size_t n_marks, mps_model** out) {
  return guarded([&] {
    need(out, "out");
    need(values, "values");
    *out = new mps_model{std::make_shared<mpstat::ConstantIntensity>(
        to_window(domain), std::vector<double>(values, values + n_marks))};
  });
}

mps_status mps_model_linear(mps_window domain, const double* coef, size_t n_marks, mps_model** out) {
  return guarded([&] {
    need(out, "out");
    need(coef, "coef");
    std::vector<mpstat::LinearSurface> s(n_marks);
    for (size_t i = 0; i < n_marks; ++i) s[i] = {coef[3 * i], coef[3 * i + 1], coef[3 * i + 2]};
    *out = new mps_model{std::make_shared<mpstat::LinearIntensity>(to_window(domain), std::move(s))};
  });
}

mps_status mps_model_kernel(mps_window window, const double* xy, size_t n, double sigma, mps_edge edge,
                            int leave_one_out, mps_model** out) {
  return guarded([&] {
    need(out, "out");
    mpstat::KernelOptions opts;
    opts.edge = edge == MPS_EDGE_LOCAL ? mpstat::EdgeCorrection::local : mpstat::EdgeCorrection::torus;
    opts.leave_one_out = leave_one_out != 0;
    const auto locs = to_points(xy, n);
    *out = new mps_model{std::make_shared<mpstat::KernelIntensity>(locs, to_window(window), sigma, opts)};
  });
}

mps_status mps_model_per_mark(const mps_model* const* components, size_t n, mps_model** out) {
  return guarded([&] {
    need(out, "out");
    need(components, "components");
    std::vector<mpstat::ModelPtr> c;
    for (size_t i = 0; i < n; ++i) {
      need(components[i], "component");
      c.push_back(components[i]->m);
    }
    *out = new mps_model{std::make_shared<mpstat::PerMarkIntensity>(std::move(c))};
  });
}

mps_status mps_model_scaled(const mps_model* base, double scale, mps_model** out) {
  return guarded([&] {
    need(out, "out");
    need(base, "base");
    *out = new mps_model{std::make_shared<mpstat::ScaledIntensity>(base->m, scale)};
  });
}

mps_status mps_model_evaluate(const mps_model* m, double x, double y, uint32_t mark, double* value) {
  return guarded([&] {
    need(m, "model");
    need(value, "value");
    *value = m->m->evaluate({x, y}, mark);
  });
}

mps_status mps_model_lower_bound(const mps_model* m, const mps_pattern* p, const uint32_t* marks,
                                 size_t n_marks, int grid_n, double* value) {
  return guarded([&] {
    need(m, "model");
    need(p, "pattern");
    need(value, "value");
    *value = mpstat::lower_bound(*m->m, to_markset(marks, n_marks), p->p, grid_n);
  });
}

mps_status mps_fit_scale(const mps_model* base, const mps_pattern* p, int raster_n, double* scale) {
  return guarded([&] {
    need(base, "model");
    need(p, "pattern");
    need(scale, "scale");
    *scale = mpstat::fit_scale(*base->m, p->p, raster_n);
  });
}

void mps_model_destroy(mps_model* m) { delete m; }

mps_status mps_summarize(const mps_pattern* p, const mps_model* m, const uint32_t* from, size_t n_from,
                         const uint32_t* to, size_t n_to, const double* r, size_t n_r, int probe_n,
                         mps_estimate** out) {
  return guarded([&] {
    need(out, "out");
    need(p, "pattern");
    need(m, "model");
    mpstat::SummaryOptions opts;
    if (probe_n > 0) opts.probe_n = probe_n;
    *out = new mps_estimate{mpstat::summarize(p->p, *m->m, to_markset(from, n_from), to_markset(to, n_to),
                                              to_rgrid(r, n_r), opts)};
  });
}

size_t mps_estimate_size(const mps_estimate* e) { return e ? e->e.rgrid.size() : 0; }
double mps_estimate_lambda_bar(const mps_estimate* e) {
  return e ? e->e.lambda_bar : std::numeric_limits<double>::quiet_NaN();
}

mps_status mps_estimate_value(const mps_estimate* e, mps_statistic s, size_t i, double* value, int* defined) {
  return guarded([&] {
    need(e, "estimate");
    mpstat::require(i < e->e.rgrid.size(), "r index out of range");
    const mpstat::Curve* c = nullptr;
    switch (to_statistic(s)) {
      case mpstat::Statistic::F: c = &e->e.F; break;
      case mpstat::Statistic::D: c = &e->e.D; break;
      case mpstat::Statistic::J: c = &e->e.J; break;
      case mpstat::Statistic::K: c = &e->e.K; break;
    }
    if (value) *value = value_or_nan(*c, i);
    if (defined) *defined = (*c)[i].has_value() ? 1 : 0;
  });
}

mps_status mps_estimate_write_csv(const mps_estimate* e, const char* path) {
  return guarded([&] {
    need(e, "estimate");
    auto f = open_file(path);
    mpstat::write_summary_csv(f, e->e);
  });
}

void mps_estimate_destroy(mps_estimate* e) { delete e; }

mps_test_options mps_test_options_default(void) {
  const mpstat::MonteCarloOptions d;
  return {d.replicates, d.rank, d.seed, d.threads, d.probe_n};
}

mps_status mps_test_random_labelling(const mps_pattern* p, const mps_model* ground, const uint32_t* from,
                                     size_t n_from, mps_statistic s, const double* r, size_t n_r,
                                     const mps_test_options* opts, mps_envelope** out) {
  return guarded([&] {
    need(out, "out");
    need(p, "pattern");
    need(ground, "model");
    *out = new mps_envelope{mpstat::test_random_labelling(p->p, ground->m, to_markset(from, n_from),
                                                          to_statistic(s), to_rgrid(r, n_r), to_options(opts))};
  });
}

mps_status mps_test_independence(const mps_pattern* p, const mps_model* m, const uint32_t* from,
                                 size_t n_from, const uint32_t* to, size_t n_to, mps_statistic s,
                                 const double* r, size_t n_r, const mps_test_options* opts,
                                 mps_envelope** out) {
  return guarded([&] {
    need(out, "out");
    need(p, "pattern");
    need(m, "model");
    *out = new mps_envelope{mpstat::test_independence_ls(p->p, m->m, to_markset(from, n_from),
                                                         to_markset(to, n_to), to_statistic(s),
                                                         to_rgrid(r, n_r), to_options(opts))};
  });
}

size_t mps_envelope_size(const mps_envelope* e) { return e ? e->e.rgrid.size() : 0; }

mps_status mps_envelope_row(const mps_envelope* e, size_t i, double* r, double* observed, double* lo,
                            double* hi) {
  return guarded([&] {
    need(e, "envelope");
    mpstat::require(i < e->e.rgrid.size(), "r index out of range");
    if (r) *r = e->e.rgrid[i];
    if (observed) *observed = value_or_nan(e->e.observed, i);
    if (lo) *lo = value_or_nan(e->e.lower, i);
    if (hi) *hi = value_or_nan(e->e.upper, i);
  });
}

int mps_envelope_rejects(const mps_envelope* e, size_t i) {
  return e && i < e->e.rgrid.size() && e->e.rejects(i) ? 1 : 0;
}

mps_status mps_envelope_write_csv(const mps_envelope* e, const char* path) {
  return guarded([&] {
    need(e, "envelope");
    auto f = open_file(path);
    mpstat::write_envelope_csv(f, e->e);
  });
}

void mps_envelope_destroy(mps_envelope* e) { delete e; }

mps_status mps_run_command(const char* command, const char* config_json, char** report_json) {
  if (report_json) *report_json = nullptr;
  nlohmann::json report;
  const mps_status s = guarded([&] {
    need(command, "command");
    need(config_json, "config");
    const auto cfg = nlohmann::json::parse(config_json);
    const mpstat::RunReport r = mpstat::run_command(command, cfg);
    report = {{"outputs", r.outputs}, {"warnings", r.warnings}, {"metadata", r.metadata}};
  });
  if (s != MPS_OK) {
    report = {{"error", g_last_error}, {"status", static_cast<int>(s)}};
  }
  if (report_json) *report_json = dup_string(report.dump());
  return s;
}

void mps_string_free(char* s) { std::free(s); }

}  // extern "C"
