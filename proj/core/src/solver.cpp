// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/errors.hpp"
#include "mfpma/exact.hpp"
#include "mfpma/mirror.hpp"

namespace mfpma {

Policy gamma_eta(const GameSpec& game, const Regularizer& h, double eta,
                 double delta_h, const Policy& pi, double tol) {
  const Vector mu = stable_population(game, pi, tol);
  const QFunction q = gamma_q(game, pi, mu, h);
  return pma_step(q, pi, eta, h, delta_h, tol);
}

ExactSolution solve_exact(const GameSpec& game, const Regularizer& h,
                          double eta, const ExactOptions& options) {
  if (options.max_iterations < 1) {
    throw DomainError("max_iterations must be >= 1");
  }
  const ConstantsLedger c =
      compute_constants(game, h, eta, std::nullopt, options.delta_h);
  if (options.strict && !c.contraction_ok) {
    throw ContractionViolation("L_Gamma_eta", c.L_Gamma_eta);
  }

  const int S = game.num_states();
  const int A = game.num_actions();
  Matrix start(S, A);
  start.rowwise() = h.u_max(A).transpose();
  ExactSolution out{Policy(start), Vector(), {}, false};

  for (int t = 0; t < options.max_iterations; ++t) {
    Policy next = gamma_eta(game, h, eta, c.delta_h, out.pi, options.tol);
    const double r = policy_distance(next, out.pi);
    out.residuals.push_back(r);
    out.pi = std::move(next);
    if (r <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.mu = stable_population(game, out.pi, options.tol);
  return out;
}

}  // namespace mfpma
