// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfpma/game.hpp"
#include "mfpma/regularizer.hpp"

namespace mfpma::tools {

using Json = nlohmann::json;

enum class Mode {
  kConstants,
  kSolveExact,
  kTrainCentralized,
  kTrainIndependent,
  kCtdOnly,
  kBiasScaling,
};

const char* mode_name(Mode m);

struct ScheduleConfig {
  std::string type = "practical";  // practical | theoretical
  int K = 30;
  int M_pg = 2000;
  int M_td = 0;        // 0: derived from the mixing estimate
  int M = 20000;       // ctd_only
  double epsilon = 0.1;  // theoretical
  std::string beta = "mu_F";  // mu_F | 1-gamma
  std::optional<double> t0;
  double mtd_target = 0.1;
};

struct Tolerances {
  double mirror = 1e-10;
  double population = 1e-10;
  double value = 1e-10;
};

struct ExperimentConfig {
  Mode mode = Mode::kConstants;
  ExampleGameParams game;
  std::string h_kind = "entropy";
  double tau = 1.0;
  double eta = 1.0;
  int N = 500;
  std::vector<std::uint64_t> seeds{1};
  bool strict = true;
  ScheduleConfig schedule;
  Tolerances tol;
  std::string policy = "exact";  // fixed policy: exact | max | uniform
  std::vector<int> Ns{16, 64, 256, 1024};
  int T = 200;
  double mixing_target = 0.0;  // 0: half the uniform mass, 0.5 / |S|
  bool exploitability = true;
  bool q_error = false;
  std::string out = "results";
};

// Parses a config document or a run manifest (its "config" member).
// Throws ValidationError naming the offending field.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

// Fully resolved config; parse_config(to_json(c)) reproduces c.
Json to_json(const ExperimentConfig& c);

GameSpec build_game(const ExperimentConfig& c);
Regularizer build_regularizer(const ExperimentConfig& c);

}  // namespace mfpma::tools
