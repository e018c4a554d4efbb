// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace mpstat {

/// Outcome of one command: files written, warnings for the user, and the
/// metadata document that was written next to the main output.
struct RunReport {
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  nlohmann::json metadata;
};

/// Runs `simulate`, `intensity`, `summary`, `test-independence` or
/// `test-randomlabel` on a JSON configuration (see README for the schema).
/// Outputs are `<output>.csv` and `<output>.json`. Everything is a pure
/// function of the configuration, input files and seed.
RunReport run_command(const std::string& command, const nlohmann::json& config);

/// Names of the supported commands.
const std::vector<std::string>& command_names();

}  // namespace mpstat
