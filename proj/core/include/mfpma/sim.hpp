// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mfpma/game.hpp"
#include "mfpma/rng.hpp"
#include "mfpma/types.hpp"

namespace mfpma {

struct Transition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
  int a_next = -1;  // -1 until the following action is drawn
};

enum class InitMode { kUniformRandom, kAllAt, kCustom };

struct InitSpec {
  InitMode mode = InitMode::kUniformRandom;
  int state = 0;
  std::vector<int> states;

  static InitSpec uniform_random() { return {}; }
  static InitSpec all_at(int s) { return {InitMode::kAllAt, s, {}}; }
  static InitSpec custom(std::vector<int> v) {
    return {InitMode::kCustom, 0, std::move(v)};
  }
};

struct StepResult {
  std::vector<Transition> transitions;  // one per agent, a_next unset
  Vector mu_hat;                        // population before the move
};

// N agents moving synchronously. Agent states can only be changed by
// stepping; the draw of agent i at step t depends only on (seed, i, t).
class Simulator {
 public:
  Simulator(const GameSpec& game, int num_agents, const InitSpec& init,
            std::uint64_t seed);
  // The game is held by reference and must outlive the simulator.
  Simulator(GameSpec&&, int, const InitSpec&, std::uint64_t) = delete;

  const GameSpec& game() const { return *game_; }
  int num_agents() const { return static_cast<int>(states_.size()); }
  std::uint64_t t() const { return t_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& states() const { return states_; }
  Vector empirical_mu() const;

  StepResult step(const Policy& shared);
  StepResult step(const std::vector<Policy>& per_agent);

  // Allocation-free variants. `out` is resized to N.
  void step_into(const Policy& shared, std::vector<Transition>& out,
                 Vector& mu_hat);
  void step_into(const std::vector<Policy>& per_agent,
                 std::vector<Transition>& out, Vector& mu_hat);

  // Actions the agents will take at the next step under the given policies.
  // Identical to the actions the next call to step() draws.
  std::vector<int> next_actions(const Policy& shared) const;
  std::vector<int> next_actions(const std::vector<Policy>& per_agent) const;
  int next_action(int agent, const Policy& pi) const;

 private:
  void advance(const Policy* shared, const std::vector<Policy>* per_agent,
               std::vector<Transition>& out, Vector& mu_hat);
  void check_policies(const Policy* shared,
                      const std::vector<Policy>* per_agent) const;

  const GameSpec* game_;
  CounterRng rng_;
  std::uint64_t seed_;
  std::uint64_t t_ = 0;
  std::vector<int> states_;
  std::vector<int> counts_;

  // Per-step cache of transition rows and rewards, filled on demand.
  std::vector<double> rows_;  // [(s * A + a) * S + s']
  std::vector<double> rewards_;
  std::vector<std::uint64_t> stamp_;
};

struct FixedPolicyRun {
  std::vector<std::vector<Transition>> transitions;  // [t][agent]
  std::vector<Vector> mu_path;                       // mu_hat at each t
};

// T completed transitions per agent, a_next included.
FixedPolicyRun run_fixed_policy(Simulator& sim, const Policy& shared, int T);
FixedPolicyRun run_fixed_policy(Simulator& sim,
                                const std::vector<Policy>& per_agent, int T);

struct BiasRow {
  int N = 0;
  double mean = 0.0;       // mean over seeds of ||mu_hat_T - mu*||_1
  double std_error = 0.0;
  double bound = 0.0;      // sqrt(2|S|/N) / (1 - L_pop_mu)
};

struct BiasTable {
  std::vector<BiasRow> rows;
  double slope = 0.0;      // least-squares slope of log mean vs log N
  bool horizon_warning = false;
};

BiasTable population_bias_experiment(const GameSpec& game, const Policy& pi,
                                     const std::vector<int>& Ns, int T,
                                     const std::vector<std::uint64_t>& seeds);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// CSV columns: t, agent, s, a, r, s_next
void write_trajectory_csv(std::ostream& os, const FixedPolicyRun& run);
// CSV columns: t, mu_0, ..., mu_{S-1}
void write_mu_path_csv(std::ostream& os, const std::vector<Vector>& mu_path);

}  // namespace mfpma
