// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include "mpstat/run.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "mpstat/error.hpp"
#include "mpstat/estimators.hpp"
#include "mpstat/intensity.hpp"
#include "mpstat/io.hpp"
#include "mpstat/mctest.hpp"
#include "mpstat/simulate.hpp"
#include "mpstat/version.hpp"

namespace mpstat {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::config, what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("config field '") + key + "' has the wrong type");
  }
}

Window parse_window(const json& cfg) {
  if (!cfg.contains("window")) config_error("config needs 'window': [xmin, xmax, ymin, ymax]");
  const auto& w = cfg.at("window");
  if (!w.is_array() || w.size() != 4) config_error("'window' must be [xmin, xmax, ymin, ymax]");
  try {
    return Window(w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>());
  } catch (const json::exception&) {
    config_error("'window' entries must be numbers");
  } catch (const Error& e) {
    config_error(e.what());
  }
}

struct RunConfig {
  Window window{0.0, 1.0, 0.0, 1.0};
  std::vector<std::string> labels;
  std::vector<double> nu;
  IngestConfig ingest;
  std::string input_path;
  json intensity;
  json simulate;
  std::optional<RGrid> rgrid;
  SummaryOptions summary;
  int raster_n = 128;
  std::vector<std::string> from, to;
  int replicates = 99;
  int rank = 5;
  std::string statistic;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output;
  bool self_test = false;
};

RunConfig parse_config(const std::string& command, const json& cfg) {
  if (!cfg.is_object()) config_error("configuration must be a JSON object");
  RunConfig rc;
  rc.window = parse_window(cfg);
  if (cfg.contains("marks")) {
    rc.labels = get_or<std::vector<std::string>>(cfg.at("marks"), "labels", {});
    rc.nu = get_or<std::vector<double>>(cfg.at("marks"), "nu", {});
    if (!rc.nu.empty() && rc.nu.size() != rc.labels.size()) {
      config_error("'marks.nu' needs one weight per label in 'marks.labels'");
    }
  }
  rc.output = get_or<std::string>(cfg, "output", "");
  if (rc.output.empty()) config_error("config needs 'output' (path prefix for result files)");
  rc.seed = get_or<std::uint64_t>(cfg, "seed", 0);
  rc.threads = get_or<unsigned>(cfg, "threads", 0);
  rc.self_test = get_or<bool>(cfg, "self_test", false);
  rc.intensity = cfg.value("intensity", json::object());
  rc.simulate = cfg.value("simulate", json::object());
  rc.summary.probe_n = get_or<int>(cfg, "probe_grid", 64);
  rc.summary.lower_bound_grid = get_or<int>(cfg, "lower_bound_grid", 128);
  rc.summary.tol_den = get_or<double>(cfg, "tol_den", 1e-3);
  rc.raster_n = get_or<int>(cfg, "raster", 128);
  if (rc.summary.probe_n <= 0 || rc.summary.lower_bound_grid <= 0 || rc.raster_n <= 0) {
    config_error("grid sizes must be positive");
  }

  if (cfg.contains("input")) {
    const auto& in = cfg.at("input");
    rc.input_path = get_or<std::string>(in, "path", "");
    rc.ingest.dedup = get_or<bool>(in, "dedup", true);
    rc.ingest.split_column = get_or<std::string>(in, "split_column", "");
    rc.ingest.split_value = get_or<std::string>(in, "split_value", "");
    rc.ingest.x_column = get_or<std::string>(in, "x_column", "x");
    rc.ingest.y_column = get_or<std::string>(in, "y_column", "y");
    rc.ingest.mark_column = get_or<std::string>(in, "mark_column", "mark");
  }
  rc.ingest.window = rc.window;
  rc.ingest.labels = rc.labels;
  rc.ingest.nu = rc.nu;

  const bool needs_input =
      command != "simulate" && !(command == "summary" && rc.self_test);
  if (needs_input) {
    if (rc.input_path.empty()) config_error("config needs 'input.path'");
    if (!std::filesystem::exists(rc.input_path)) {
      fail(ErrorCode::io, "input file '" + rc.input_path + "' does not exist");
    }
  }
  if (rc.intensity.contains("path")) {
    const auto p = rc.intensity.at("path").get<std::string>();
    if (!std::filesystem::exists(p)) fail(ErrorCode::io, "intensity file '" + p + "' does not exist");
  }

  if (cfg.contains("r")) {
    rc.rgrid = RGrid(get_or<std::vector<double>>(cfg, "r", {}));
  } else if (cfg.contains("rgrid")) {
    const auto& g = cfg.at("rgrid");
    rc.rgrid = RGrid::linspace(get_or<double>(g, "rmax", 0.0), get_or<std::size_t>(g, "count", 0));
  }
  if (rc.rgrid) {
    const double half = 0.5 * std::min(rc.window.width(), rc.window.height());
    if (!(rc.rgrid->max() < half)) {
      config_error("maximum r must be below half the shorter window side");
    }
  } else if (command == "summary" || command.rfind("test-", 0) == 0) {
    config_error("config needs 'rgrid': {\"rmax\": ..., \"count\": ...} or 'r': [...]");
  }

  rc.from = get_or<std::vector<std::string>>(cfg, "C", {});
  rc.to = get_or<std::vector<std::string>>(cfg, "D", {});
  const json test = cfg.value("test", json::object());
  rc.replicates = get_or<int>(test, "N", 99);
  rc.rank = get_or<int>(test, "k", 5);
  rc.statistic = get_or<std::string>(test, "statistic", command == "test-randomlabel" ? "D" : "J");
  if (command.rfind("test-", 0) == 0) {
    if (rc.rank < 1) config_error("test.k must be >= 1");
    if (rc.replicates < 2 * rc.rank) {
      config_error("test.N must be at least 2 * test.k (got N=" + std::to_string(rc.replicates) +
                   ", k=" + std::to_string(rc.rank) + ")");
    }
  }
  return rc;
}

MarkSpace markspace_for_simulation(const RunConfig& rc) {
  std::vector<std::string> labels = rc.labels.empty() ? std::vector<std::string>{"1", "2"} : rc.labels;
  return rc.nu.empty() ? MarkSpace(labels) : MarkSpace(labels, rc.nu);
}

LinearSurface parse_surface(const json& s) {
  if (s.is_number()) return {s.get<double>(), 0.0, 0.0};
  if (s.is_object()) {
    return {get_or<double>(s, "a", 0.0), get_or<double>(s, "bx", 0.0), get_or<double>(s, "by", 0.0)};
  }
  config_error("an intensity surface is a number or {\"a\":..,\"bx\":..,\"by\":..}");
}

// Analytic per-mark surfaces or a single ground surface.
ModelPtr analytic_model(const json& spec, const Window& window, const MarkSpace& marks) {
  if (spec.contains("ground")) {
    auto g = std::make_shared<LinearIntensity>(window, std::vector<LinearSurface>{parse_surface(spec.at("ground"))});
    return std::make_shared<MarkAgnosticIntensity>(std::move(g));
  }
  if (!spec.contains("surfaces") || !spec.at("surfaces").is_object()) {
    config_error("analytic intensity needs 'surfaces' (per mark label) or 'ground'");
  }
  const auto& s = spec.at("surfaces");
  std::vector<LinearSurface> surfaces;
  for (const auto& label : marks.labels()) {
    if (!s.contains(label)) config_error("analytic intensity has no surface for mark '" + label + "'");
    surfaces.push_back(parse_surface(s.at(label)));
  }
  return std::make_shared<LinearIntensity>(window, std::move(surfaces));
}

bool is_ground_spec(const json& spec) {
  const std::string source = get_or<std::string>(spec, "source", "analytic");
  if (source == "analytic") return spec.contains("ground");
  return !get_or<bool>(spec, "per_mark", true);
}

struct BuiltModel {
  ModelPtr model;
  std::optional<double> scale;
  double mass = 0.0;
};

BuiltModel build_model(const RunConfig& rc, const json& spec, const MarkedPattern& pattern,
                       const std::vector<MarkedPoint>* held_out, RunReport& report) {
  const std::string source = get_or<std::string>(spec, "source", "analytic");
  const Window& w = pattern.window();
  const MarkSpace& marks = pattern.markspace();
  BuiltModel built;
  ModelPtr base;
  std::string scale_mode;

  if (source == "analytic") {
    base = analytic_model(spec, w, marks);
    scale_mode = "none";
  } else if (source == "kernel-from-file" || source == "kernel-split-by-column") {
    std::vector<MarkedPoint> data;
    if (source == "kernel-from-file") {
      const std::string path = get_or<std::string>(spec, "path", "");
      if (path.empty()) config_error("kernel-from-file intensity needs 'path'");
      std::size_t dropped = 0;
      data = read_estimation_points(path, rc.ingest, marks, &dropped);
      if (dropped > 0) {
        report.warnings.push_back(std::to_string(dropped) +
                                  " estimation points outside the window were dropped");
      }
    } else {
      if (!held_out || rc.ingest.split_column.empty()) {
        config_error("kernel-split-by-column needs 'input.split_column' and 'input.split_value'");
      }
      data = *held_out;
    }
    KernelOptions opts;
    const std::string edge = get_or<std::string>(spec, "edge", "torus");
    if (edge == "torus") {
      opts.edge = EdgeCorrection::torus;
    } else if (edge == "local") {
      opts.edge = EdgeCorrection::local;
    } else {
      config_error("intensity.edge must be 'torus' or 'local'");
    }
    opts.leave_one_out = get_or<bool>(spec, "leave_one_out", false);
    opts.raster_n = rc.raster_n;
    double sigma = 0.0;
    if (spec.contains("sigma") && spec.at("sigma").is_string()) {
      if (spec.at("sigma").get<std::string>() != "rule") config_error("intensity.sigma must be a number or \"rule\"");
      sigma = bandwidth_rule(w);
    } else {
      sigma = get_or<double>(spec, "sigma", 0.0);
      if (!(sigma > 0.0)) config_error("kernel intensity needs a positive 'sigma' (or \"rule\")");
    }
    if (get_or<bool>(spec, "per_mark", true)) {
      std::vector<ModelPtr> comps;
      for (MarkIndex m = 0; m < marks.size(); ++m) {
        std::vector<Vec2> locs;
        for (const auto& p : data) {
          if (p.mark == m) locs.push_back(p.location);
        }
        if (locs.empty()) {
          fail(ErrorCode::invalid_argument,
               "no data for intensity estimation of mark '" + marks.label(m) + "'");
        }
        comps.push_back(std::make_shared<KernelIntensity>(locs, w, sigma, opts));
      }
      base = std::make_shared<PerMarkIntensity>(std::move(comps));
    } else {
      std::vector<Vec2> locs;
      for (const auto& p : data) locs.push_back(p.location);
      base = std::make_shared<MarkAgnosticIntensity>(std::make_shared<KernelIntensity>(locs, w, sigma, opts));
    }
    scale_mode = "fit";
  } else {
    config_error("intensity.source must be analytic, kernel-from-file or kernel-split-by-column");
  }

  built.mass = total_mass(*base, marks, w, rc.raster_n);
  if (spec.contains("scale")) {
    if (spec.at("scale").is_number()) {
      built.scale = spec.at("scale").get<double>();
    } else {
      scale_mode = get_or<std::string>(spec, "scale", scale_mode);
      if (scale_mode != "fit" && scale_mode != "none") config_error("intensity.scale must be a number, \"fit\" or \"none\"");
    }
  }
  if (!built.scale && scale_mode == "fit") built.scale = fit_scale(*base, pattern, rc.raster_n);
  built.model = built.scale ? std::make_shared<ScaledIntensity>(base, *built.scale) : base;
  return built;
}

MarkSet resolve_marks(const std::vector<std::string>& labels, const MarkSpace& space) {
  std::vector<MarkIndex> idx;
  for (const auto& l : labels) {
    if (!space.has_label(l)) config_error("mark set refers to unknown label '" + l + "'");
    idx.push_back(space.index_of(l));
  }
  return MarkSet(std::move(idx));
}

json labels_of(const MarkSet& set, const MarkSpace& space) {
  json a = json::array();
  for (MarkIndex m : set) a.push_back(space.label(m));
  return a;
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  return out;
}

void finish(RunReport& report, const RunConfig& rc, const json& config, const std::string& command) {
  report.metadata["command"] = command;
  report.metadata["config"] = config;
  report.metadata["seed"] = rc.seed;
  report.metadata["version"] = kVersion;
  report.metadata["warnings"] = report.warnings;
  const std::string path = rc.output + ".json";
  auto out = open_output(path);
  out << report.metadata.dump(2) << '\n';
  report.outputs.push_back(path);
}

MarkedPattern simulate_pattern(const RunConfig& rc, json& meta) {
  const json& s = rc.simulate;
  const std::string model = get_or<std::string>(s, "model", "poisson");
  const std::uint64_t seed = get_or<std::uint64_t>(s, "seed", rc.seed);
  if (model == "thomas") {
    ThomasConfig t;
    t.window = rc.window;
    t.kappa = get_or<double>(s, "kappa", t.kappa);
    t.mu = get_or<double>(s, "mu", t.mu);
    t.tau = get_or<double>(s, "tau", t.tau);
    t.coupling = get_or<double>(s, "coupling", t.coupling);
    t.seed = seed;
    meta["simulation"] = {{"model", "thomas"}, {"kappa", t.kappa}, {"mu", t.mu}, {"tau", t.tau},
                          {"coupling", t.coupling}, {"seed", seed}};
    return sim_thomas_cross(t);
  }
  if (model != "poisson") config_error("simulate.model must be 'poisson' or 'thomas'");

  SimConfig sc;
  sc.window = rc.window;
  sc.marks = markspace_for_simulation(rc);
  sc.seed = seed;
  const std::string rule = get_or<std::string>(s, "rule", "independent-components");
  const json ispec = s.value("intensity", json{{"surfaces", json::object()}});
  std::vector<LinearSurface> surfaces;
  if (rule == "independent-components") {
    sc.rule = MarkingRule::independent_components;
    const json surf = ispec.value("surfaces", json::object());
    for (const auto& l : sc.marks.labels()) {
      surfaces.push_back(surf.contains(l) ? parse_surface(surf.at(l)) : LinearSurface{100.0, 0.0, 0.0});
    }
  } else if (rule == "random-labelling" || rule == "independent-marking") {
    surfaces.push_back(ispec.contains("ground") ? parse_surface(ispec.at("ground")) : LinearSurface{200.0, 0.0, 0.0});
    if (rule == "random-labelling") {
      sc.rule = MarkingRule::random_labelling;
      sc.label_probs = get_or<std::vector<double>>(
          s, "label_probs", std::vector<double>(sc.marks.size(), 1.0 / static_cast<double>(sc.marks.size())));
    } else {
      sc.rule = MarkingRule::independent_marking;
      if (!s.contains("mark_weights")) config_error("independent-marking needs 'mark_weights' per label");
      std::vector<LinearSurface> weights;
      for (const auto& l : sc.marks.labels()) {
        if (!s.at("mark_weights").contains(l)) config_error("mark_weights lacks label '" + l + "'");
        weights.push_back(parse_surface(s.at("mark_weights").at(l)));
      }
      sc.mark_weights = [weights](Vec2 z) {
        std::vector<double> w;
        for (const auto& f : weights) w.push_back(std::max(0.0, f.a + f.bx * z.x + f.by * z.y));
        return w;
      };
    }
  } else {
    config_error("simulate.rule must be independent-components, random-labelling or independent-marking");
  }
  auto lin = std::make_shared<LinearIntensity>(rc.window, surfaces);
  // A linear surface attains its supremum at a corner.
  double sup = 0.0;
  for (const auto& f : surfaces) {
    for (double x : {rc.window.xmin(), rc.window.xmax()}) {
      for (double y : {rc.window.ymin(), rc.window.ymax()}) sup = std::max(sup, f.a + f.bx * x + f.by * y);
    }
  }
  sc.lambda_max = get_or<double>(s, "lambda_max", sup);
  sc.intensity = lin;
  meta["simulation"] = {{"model", "poisson"}, {"rule", rule}, {"lambda_max", sc.lambda_max}, {"seed", seed}};
  return sim_marked(sc);
}

json analytic_spec_from_simulation(const RunConfig& rc) {
  const json& s = rc.simulate;
  if (get_or<std::string>(s, "model", "poisson") != "poisson") {
    config_error("self-test with a Thomas simulation needs an explicit 'intensity'");
  }
  const std::string rule = get_or<std::string>(s, "rule", "independent-components");
  const json ispec = s.value("intensity", json::object());
  if (rule == "independent-components") {
    json surf = ispec.value("surfaces", json::object());
    const MarkSpace marks = markspace_for_simulation(rc);
    for (const auto& l : marks.labels()) {
      if (!surf.contains(l)) surf[l] = 100.0;
    }
    return {{"source", "analytic"}, {"surfaces", surf}};
  }
  return {{"source", "analytic"}, {"ground", ispec.value("ground", json(200.0))}};
}

PatternData load(const RunConfig& rc, RunReport& report) {
  PatternData data = ingest(rc.input_path, rc.ingest);
  if (data.dropped_outside > 0) {
    report.warnings.push_back(std::to_string(data.dropped_outside) +
                              " points outside the window were dropped");
  }
  if (data.duplicates_removed > 0) {
    report.warnings.push_back(std::to_string(data.duplicates_removed) +
                              " duplicated locations were removed");
  }
  report.metadata["counts"] = {{"analysis", data.analysis.size()},
                               {"estimation", data.estimation.size()},
                               {"dropped_outside", data.dropped_outside},
                               {"duplicates_removed", data.duplicates_removed}};
  return data;
}

RunReport run_simulate(const RunConfig& rc, const json& config) {
  RunReport report;
  const MarkedPattern p = simulate_pattern(rc, report.metadata);
  const std::string path = rc.output + ".csv";
  auto out = open_output(path);
  write_pattern_csv(out, p);
  report.outputs.push_back(path);
  report.metadata["counts"] = {{"points", p.size()}};
  finish(report, rc, config, "simulate");
  return report;
}

RunReport run_intensity(const RunConfig& rc, const json& config) {
  RunReport report;
  PatternData data = load(rc, report);
  const BuiltModel built = build_model(rc, rc.intensity, data.analysis, &data.estimation, report);
  const std::string path = rc.output + ".csv";
  auto out = open_output(path);
  const MarkSpace& marks = data.analysis.markspace();
  write_raster_csv(out, *built.model, rc.window, marks, rc.raster_n);
  report.outputs.push_back(path);
  json bounds = json::object();
  for (MarkIndex m = 0; m < marks.size(); ++m) {
    bounds[marks.label(m)] = lower_bound(*built.model, MarkSet{m}, data.analysis, rc.summary.lower_bound_grid);
  }
  report.metadata["lambda_bar"] = bounds;
  report.metadata["base_mass"] = built.mass;
  report.metadata["scale"] = built.scale ? json(*built.scale) : json(nullptr);
  finish(report, rc, config, "intensity");
  return report;
}

std::pair<MarkSet, MarkSet> default_marksets(const RunConfig& rc, const MarkSpace& space) {
  MarkSet from = rc.from.empty() ? MarkSet{0} : resolve_marks(rc.from, space);
  MarkSet to;
  if (!rc.to.empty()) {
    to = resolve_marks(rc.to, space);
  } else {
    std::vector<MarkIndex> rest;
    for (MarkIndex m = 0; m < space.size(); ++m) {
      if (!from.contains(m)) rest.push_back(m);
    }
    to = rest.empty() ? from : MarkSet(rest);
  }
  return {from, to};
}

RunReport run_summary(const RunConfig& rc, const json& config) {
  RunReport report;
  std::optional<PatternData> data;
  json spec = rc.intensity;
  if (rc.self_test) {
    MarkedPattern sim = simulate_pattern(rc, report.metadata);
    data = PatternData{std::move(sim), {}, 0, 0, 0};
    if (spec.empty()) spec = analytic_spec_from_simulation(rc);
    report.metadata["counts"] = {{"analysis", data->analysis.size()}};
  } else {
    data = load(rc, report);
  }
  const MarkedPattern& pattern = data->analysis;
  const BuiltModel built = build_model(rc, spec, pattern, &data->estimation, report);
  const auto [from, to] = default_marksets(rc, pattern.markspace());
  const SummaryEstimate est = summarize(pattern, *built.model, from, to, *rc.rgrid, rc.summary);

  const std::string path = rc.output + ".csv";
  auto out = open_output(path);
  write_summary_csv(out, est);
  report.outputs.push_back(path);
  report.metadata["mark_sets"] = {{"C", labels_of(from, pattern.markspace())},
                                  {"D", labels_of(to, pattern.markspace())}};
  report.metadata["lambda_bar"] = est.lambda_bar;
  report.metadata["scale"] = built.scale ? json(*built.scale) : json(nullptr);
  finish(report, rc, config, "summary");
  return report;
}

RunReport run_test(const RunConfig& rc, const json& config, const std::string& command) {
  RunReport report;
  PatternData data = load(rc, report);
  MonteCarloOptions opts;
  opts.replicates = rc.replicates;
  opts.rank = rc.rank;
  opts.seed = rc.seed;
  opts.threads = rc.threads;
  opts.probe_n = rc.summary.probe_n;
  opts.lower_bound_grid = rc.summary.lower_bound_grid;
  opts.tol_den = rc.summary.tol_den;
  const Statistic stat = statistic_from_string(rc.statistic);

  EnvelopeResult env;
  std::optional<double> scale;
  if (command == "test-randomlabel") {
    if (!is_ground_spec(rc.intensity)) {
      config_error("random labelling needs a ground intensity: analytic 'ground' or a kernel with per_mark=false");
    }
    // Under random labelling the model is taken relative to the empirical
    // mark distribution, which also enters the mass-preserving scale.
    const MarkedPattern pattern = data.analysis.with_markspace(data.analysis.empirical_markspace());
    const BuiltModel built = build_model(rc, rc.intensity, pattern, &data.estimation, report);
    scale = built.scale;
    const MarkSet from = rc.from.empty() ? MarkSet{0} : resolve_marks(rc.from, pattern.markspace());
    env = test_random_labelling(pattern, built.model, from, stat, *rc.rgrid, opts);
  } else {
    const MarkedPattern& pattern = data.analysis;
    const BuiltModel built = build_model(rc, rc.intensity, pattern, &data.estimation, report);
    scale = built.scale;
    const auto [from, to] = default_marksets(rc, pattern.markspace());
    env = test_independence_ls(pattern, built.model, from, to, stat, *rc.rgrid, opts);
  }

  const MarkSpace& space = data.analysis.markspace();
  const std::string path = rc.output + ".csv";
  auto out = open_output(path);
  write_envelope_csv(out, env);
  report.outputs.push_back(path);
  report.metadata["test"] = env.test;
  report.metadata["statistic"] = to_string(env.statistic);
  report.metadata["k"] = env.rank;
  report.metadata["N"] = env.replicates;
  report.metadata["mark_sets"] = {{"C", labels_of(env.from, space)}, {"D", labels_of(env.to, space)}};
  report.metadata["lambda_bar"] = env.lambda_bar;
  report.metadata["scale"] = scale ? json(*scale) : json(nullptr);
  finish(report, rc, config, command);
  return report;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "intensity", "summary",
                                                 "test-independence", "test-randomlabel"};
  return names;
}

RunReport run_command(const std::string& command, const json& config) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    config_error("unknown command '" + command + "'");
  }
  const RunConfig rc = parse_config(command, config);
  if (command == "simulate") return run_simulate(rc, config);
  if (command == "intensity") return run_intensity(rc, config);
  if (command == "summary") return run_summary(rc, config);
  return run_test(rc, config, command);
}

}  // namespace mpstat
