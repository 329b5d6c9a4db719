// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfpma/exact.hpp"
#include "mfpma/game.hpp"
#include "mfpma/regularizer.hpp"
#include "mfpma/sim.hpp"
#include "mfpma/types.hpp"

namespace mfpma {

// ---------------------------------------------------------------------------
// TD operators.

struct TdDelta {
  int s = 0;
  int a = 0;
  double value = 0.0;  // the only nonzero entry, at (s, a)
};

// Q(s,a) - r - h(pi(s)) - gamma Q(s',a')
TdDelta stochastic_td_operator(const QFunction& Q, const Transition& z,
                               const Policy& pi, const Regularizer& h,
                               double gamma);

// (T Q)(s,a) = R(s,a,mu) + h(pi(s)) + gamma sum P(s'|s,a,mu) pi(a'|s') Q(s',a')
QFunction bellman_operator(const GameSpec& game, const QFunction& Q,
                           const Policy& pi, const Vector& mu,
                           const Regularizer& h);

// Expected TD step M (Q - T Q), M = diag(mu(s) pi(a|s)), with mu the stable
// population of pi.
QFunction expected_td_operator(const GameSpec& game, const QFunction& Q,
                               const Policy& pi, const Vector& mu,
                               const Regularizer& h);

// beta_m = 2 / (modulus (t0 + m - 1)), m >= 1.
struct StepSchedule {
  double modulus = 1.0;
  double t0 = 1.0;
  double operator()(long m) const;
};

// ---------------------------------------------------------------------------
// Conditional TD.

struct CtdConfig {
  int M = 1;            // TD updates
  int M_td = 2;         // simulator steps per update, >= 2
  double t0 = 1.0;
  double beta_modulus = 0.0;  // 0 selects 1 - gamma
  std::optional<double> q_init;  // default Q_max
  double pe_floor = 0.0;         // p_inf to monitor; 0 disables
};

struct CtdResult {
  QFunction Q;
  long clip_count = 0;  // updates that hit [-Q_max, 2 Q_max]
  bool pe_violation = false;
  long steps = 0;
};

// Runs M blocks of M_td steps; after each block updates Q with the tracked
// agent's transition started two steps before the block end.
CtdResult ctd_learn(Simulator& sim, const Policy& shared, int tracked_agent,
                    const CtdConfig& cfg, const Regularizer& h);
CtdResult ctd_learn(Simulator& sim, const std::vector<Policy>& per_agent,
                    int tracked_agent, const CtdConfig& cfg,
                    const Regularizer& h);

// ---------------------------------------------------------------------------
// Policy mirror ascent from samples.

struct PmaConfig {
  int K = 1;
  int M_pg = 1;
  int M_td = 2;
  double eta = 1.0;
  double tol_inner = 1e-10;
  double t0 = 1.0;
  double beta_modulus = 0.0;  // 0 selects 1 - gamma
  std::optional<double> delta_h;  // default L_h
  double pe_floor = 0.0;
  bool strict = true;
  InitSpec init = InitSpec::uniform_random();
};

struct EpochRecord {
  int epoch = 0;             // policy index k after the update
  double dist_to_ref = -1;   // ||pi_k - reference||, -1 without reference
  double exploitability = -1;
  double delta_pibar = 0;    // (1/N) sum_i ||pi^i - pi^1||
  double max_deviation = 0;  // max_i ||pi^i - pi^1||
  double q_error = -1;       // ||Q_hat - Q(pi_k at its stable population)||
  long steps = 0;            // cumulative simulator steps
  double wall_seconds = 0;
};

struct LearnReport {
  std::vector<EpochRecord> epochs;
  std::vector<Policy> snapshots;  // filled when requested
  long total_steps = 0;
  long clip_count = 0;
  bool pe_violation = false;
};

struct LearnOptions {
  std::optional<Policy> reference;
  bool exploitability = false;
  bool q_error = false;
  bool snapshots = false;
  // Called with (learner index, transition handed to that learner) before
  // every independent-mode TD update.
  std::function<void(int, const Transition&)> observe;
};

struct CentralizedResult {
  Policy pi;
  LearnReport report;
};

struct IndependentResult {
  std::vector<Policy> pi;
  LearnReport report;
};

CentralizedResult centralized_pma(const GameSpec& game, const Regularizer& h,
                                  const PmaConfig& cfg, int N,
                                  std::uint64_t seed,
                                  const LearnOptions& options = {});

IndependentResult independent_pma(const GameSpec& game, const Regularizer& h,
                                  const PmaConfig& cfg, int N,
                                  std::uint64_t seed,
                                  const LearnOptions& options = {});

// (1/N) sum_i ||pi^i - pi^1||
double mean_deviation(const std::vector<Policy>& policies);

// CSV columns: epoch, dist_to_exact, exploitability, delta_pibar, q_error,
// steps, seed
void write_report_csv(std::ostream& os, const LearnReport& report,
                      std::uint64_t seed, bool header = true);

// One line per state, space separated probabilities.
void write_policy_text(std::ostream& os, const Policy& pi);
Policy read_policy_text(std::istream& is);

// ---------------------------------------------------------------------------
// Schedules implied by the convergence theorems.

enum class Regime { kCentralized, kIndependent };

struct TheoreticalSchedule {
  // Smallest integers strictly above each bound; kept as doubles because
  // they routinely exceed the int range.
  double K = 0, M_pg = 0, M_td = 0;
  std::string branch;  // "centralized", "c_eta<1", "c_eta=1", "c_eta>1"
};

TheoreticalSchedule theoretical_schedule(const ConstantsLedger& ledger,
                                         double epsilon, Regime regime);

// Bound on E[Delta_k] from Delta_{k+1} <= c Delta_k + L_md_q eps_td with
// Delta_0 = 0.
double deviation_recursion_bound(double c_eta, double l_md_q, double eps_td,
                                 int k);

}  // namespace mfpma
