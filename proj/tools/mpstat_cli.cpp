// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpstat/mpstat.h"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> output;
  std::optional<std::string> input;
  std::optional<int> replicates;
  std::optional<int> rank;
  std::optional<std::string> statistic;
  std::optional<double> sigma;
  std::optional<double> rmax;
  std::optional<std::size_t> rcount;
  bool self_test = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  sub->add_option("-o,--output", o.output, "output path prefix");
  sub->add_option("-i,--input", o.input, "input CSV (overrides input.path)");
  sub->add_option("--sigma", o.sigma, "kernel bandwidth");
  sub->add_option("--rmax", o.rmax, "largest r");
  sub->add_option("--rcount", o.rcount, "number of r values");
}

nlohmann::json merged(const Overrides& o) {
  std::ifstream in(o.config_path);
  nlohmann::json cfg = nlohmann::json::parse(in);
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.threads) cfg["threads"] = *o.threads;
  if (o.output) cfg["output"] = *o.output;
  if (o.input) cfg["input"]["path"] = *o.input;
  if (o.replicates) cfg["test"]["N"] = *o.replicates;
  if (o.rank) cfg["test"]["k"] = *o.rank;
  if (o.statistic) cfg["test"]["statistic"] = *o.statistic;
  if (o.sigma) cfg["intensity"]["sigma"] = *o.sigma;
  if (o.rmax) cfg["rgrid"]["rmax"] = *o.rmax;
  if (o.rcount) cfg["rgrid"]["count"] = *o.rcount;
  if (o.self_test) cfg["self_test"] = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Summary statistics and Monte Carlo tests for multivariate point patterns"};
  app.set_version_flag("--version", std::string(mps_version()));
  app.require_subcommand(1);

  Overrides o;
  auto* sim = app.add_subcommand("simulate", "simulate a marked pattern");
  auto* inten = app.add_subcommand("intensity", "estimate an intensity raster");
  auto* summ = app.add_subcommand("summary", "F, D, J and K estimates");
  auto* indep = app.add_subcommand("test-independence", "Lotwick-Silverman envelope test");
  auto* rl = app.add_subcommand("test-randomlabel", "random labelling envelope test");
  for (auto* s : {sim, inten, summ, indep, rl}) add_common(s, o);
  summ->add_flag("--self-test", o.self_test, "simulate from the configured model and analyse it");
  for (auto* s : {indep, rl}) {
    s->add_option("-N,--replicates", o.replicates, "Monte Carlo replicates");
    s->add_option("-k,--rank", o.rank, "envelope rank");
    s->add_option("--statistic", o.statistic, "F, D, J or K");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  nlohmann::json cfg;
  try {
    cfg = merged(o);
  } catch (const std::exception& e) {
    std::cerr << "mpstat: cannot read configuration: " << e.what() << '\n';
    return MPS_ERR_CONFIG;
  }

  char* report = nullptr;
  const mps_status status = mps_run_command(command.c_str(), cfg.dump().c_str(), &report);
  const nlohmann::json r = report ? nlohmann::json::parse(report) : nlohmann::json::object();
  mps_string_free(report);
  if (status != MPS_OK) {
    std::cerr << "mpstat: error: " << mps_last_error() << '\n';
    return static_cast<int>(status);
  }
  for (const auto& w : r.value("warnings", nlohmann::json::array())) {
    std::cerr << "mpstat: warning: " << w.get<std::string>() << '\n';
  }
  for (const auto& f : r.value("outputs", nlohmann::json::array())) {
    std::cout << f.get<std::string>() << '\n';
  }
  return 0;
}
