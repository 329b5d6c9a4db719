// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "mfpma/version.hpp"
#include "mfpma_tools/runner.hpp"

int main(int argc, char** argv) {
  using namespace mfpma::tools;
  CLI::App app{"Mean-field policy mirror ascent experiments"};
  app.set_version_flag("--version", mfpma::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  RunOverrides overrides;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config or manifest");
  run->add_option("--config", config_path, "JSON config or manifest")->required();
  auto* seed_opt = run->add_option("--seed-override", seed, "Replace the seed list");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");

  std::string constants_config;
  auto* constants = app.add_subcommand("constants", "Print the constants ledger as JSON");
  constants->add_option("--config", constants_config, "JSON config")->required();

  std::string csv, kind, img;
  auto* plot = app.add_subcommand("plot", "Render a CSV artifact as SVG");
  plot->add_option("--csv", csv)->required();
  plot->add_option("--kind", kind, "convergence | bias_scaling")->required();
  plot->add_option("--out", img)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*run) {
    if (*seed_opt) overrides.seed = seed;
    if (*out_opt) overrides.out = out_dir;
    return run_command(config_path, overrides, std::cout, std::cerr);
  }
  if (*constants) return constants_command(constants_config, std::cout, std::cerr);
  return plot_command(csv, kind, img, std::cerr);
}
