// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "mfpma/game.hpp"
#include "mfpma/regularizer.hpp"
#include "mfpma/types.hpp"

namespace mfpma {

// ---------------------------------------------------------------------------
// Population operators.

// nu(s) = sum_{s',a'} mu(s') pi(a'|s') P(s | s', a', mu)
Vector pop_update(const GameSpec& game, const Vector& mu, const Policy& pi);

// State kernel P_pi(s, s') at a frozen population mu.
Matrix state_kernel(const GameSpec& game, const Policy& pi, const Vector& mu);

// Iteration cap ceil(log(2/tol) / log(1/L)) used by stable_population.
int stable_population_iteration_cap(double l_pop_mu, double tol);

// Fixed point of mu -> pop_update(mu, pi), iterated from the uniform
// distribution. Throws ContractionViolation when L_pop_mu >= 1.
Vector stable_population(const GameSpec& game, const Policy& pi,
                         double tol = 1e-10);

// ---------------------------------------------------------------------------
// Value functions.

struct ValueFunctions {
  QFunction Q;  // regularized action values
  QFunction q;  // Q(s,a) - h(pi(s))
  Vector V;     // V(s) = sum_a pi(a|s) Q(s,a)
};

// Direct solve of (I - gamma P^{pi,mu}) Q = r_mu + h_pi. Throws
// SolverFailure when the Bellman residual exceeds residual_tol.
ValueFunctions value_functions(const GameSpec& game, const Policy& pi,
                               const Vector& mu, const Regularizer& h,
                               double residual_tol = 1e-10);

QFunction gamma_q(const GameSpec& game, const Policy& pi, const Vector& mu,
                  const Regularizer& h);

// (1 + h_max) / (1 - gamma)
double q_max(const GameSpec& game, const Regularizer& h);

// Optimal regularized values max_pi V_h(pi, mu) by soft value iteration.
Vector optimal_values(const GameSpec& game, const Regularizer& h,
                      const Vector& mu, double tol = 1e-10);

struct ExploitabilityReport {
  double weighted = 0.0;   // initial distribution mu_pi
  double max_state = 0.0;  // worst single initial state
  Vector mu;               // stable population of pi
};

ExploitabilityReport exploitability_report(const GameSpec& game,
                                           const Regularizer& h,
                                           const Policy& pi,
                                           double tol = 1e-10);

// V_h(best response, mu_pi) - V_h(pi, mu_pi) from s_0 ~ mu_pi.
double exploitability(const GameSpec& game, const Regularizer& h,
                      const Policy& pi, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Constants.

struct MixingParams {
  int T_mix = 1;
  double delta_mix = 1.0;
  double p_inf = 0.0;
};

struct CtdConstants {
  double C1 = 0, C2 = 0, Cpop1 = 0, Cpop2 = 0, Cpol1 = 0, Cpol2 = 0, C_h = 0;
};

struct ConstantsLedger {
  double delta_h = 0;  // level threshold used for Pi_{delta h}
  double L_pop_mu = 0, L_pop_inf = 0, L_h = 0;
  double L_Vs = 0, L_Vpi = 0, L_Vmu = 0, L_qpi = 0, L_qmu = 0;
  double L_md_q = 0, L_md_pi = 0, L_Gamma_q = 0, L_Gamma_eta = 0;
  double rho = 0, q_max = 0, h_max = 0, eta = 0, gamma = 0;
  int num_states = 0, num_actions = 0;
  bool contraction_ok = false;

  // Filled only when mixing parameters are supplied.
  bool has_mixing = false;
  MixingParams mixing;
  double c_eta = 0, mu_F = 0, rho_mix = 0, C_mix = 0, t0 = 0, M_td_min = 0;
  CtdConstants ctd;
};

// L_h = L_a + gamma L_s K_a / (2 - gamma K_s)
double level_threshold(const GameSpec& game);

// Evaluates every ledger formula. delta_h defaults to L_h. Throws
// ContractionViolation when L_pop_mu >= 1 and InfeasibleConstant on
// degenerate denominators.
ConstantsLedger compute_constants(const GameSpec& game, const Regularizer& h,
                                  double eta,
                                  std::optional<MixingParams> mixing = {},
                                  std::optional<double> delta_h = {});

// ---------------------------------------------------------------------------
// Composite map and exact solver.

Policy gamma_eta(const GameSpec& game, const Regularizer& h, double eta,
                 double delta_h, const Policy& pi, double tol = 1e-10);

struct ExactOptions {
  int max_iterations = 10000;
  double tol = 1e-10;
  std::optional<double> delta_h;  // default L_h
  bool strict = true;             // refuse when L_Gamma_eta >= 1
};

struct ExactSolution {
  Policy pi;
  Vector mu;
  std::vector<double> residuals;  // ||pi_{t+1} - pi_t||_1
  bool converged = false;
};

// Fixed-point iteration pi_{t+1} = Gamma_eta(pi_t) from pi_max.
ExactSolution solve_exact(const GameSpec& game, const Regularizer& h,
                          double eta, const ExactOptions& options = {});

// ---------------------------------------------------------------------------
// Mixing.

// Smallest power T with min entry of P_pi(mu)^T >= target_delta (T <= 10^4).
// Throws MixingCertificationFailure when the cap is reached.
MixingParams estimate_mixing(const GameSpec& game, const Policy& pi,
                             const Vector& mu, double target_delta,
                             double p_inf);

// Steps between TD updates for practical runs: the smallest M >= 2 with
// (1 - delta_mix)^{floor(M / T_mix)} <= target and L_pop_mu^M <= target.
int practical_mtd(const MixingParams& mix, double l_pop_mu,
                  double target = 0.1);

}  // namespace mfpma
