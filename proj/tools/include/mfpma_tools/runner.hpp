// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>

#include "mfpma/errors.hpp"
#include "mfpma_tools/config.hpp"

namespace mfpma::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitRefusal = 3,
  kExitNumerical = 4,
};

// A run declined because a theoretical precondition does not hold.
class Refusal : public Error {
 public:
  using Error::Error;
};

int exit_code_for(const std::exception& e);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

// Executes the mode named in the config, writing artifacts and a manifest
// under config.out. Returns the summary written to summary.json.
Json run_experiment(const ExperimentConfig& config, std::ostream& log);

// Ledger (with mixing quantities when they can be certified) and the
// theoretical schedules it implies.
Json constants_report(const ExperimentConfig& config);

// Command entry points: print diagnostics to `err`, return the exit code.
int run_command(const std::string& config_path, const RunOverrides& o,
                std::ostream& out, std::ostream& err);
int constants_command(const std::string& config_path, std::ostream& out,
                      std::ostream& err);
int plot_command(const std::string& csv_path, const std::string& kind,
                 const std::string& out_path, std::ostream& err);

}  // namespace mfpma::tools
