// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <sstream>

#include "mfpma/errors.hpp"
#include "mfpma/exact.hpp"

namespace mfpma {

Vector pop_update(const GameSpec& game, const Vector& mu, const Policy& pi) {
  game.check_distribution(mu);
  game.check_policy(pi);
  const int S = game.num_states();
  const int A = game.num_actions();
  Vector nu = Vector::Zero(S);
  Vector row(S);
  for (int s = 0; s < S; ++s) {
    if (mu[s] == 0.0) continue;
    for (int a = 0; a < A; ++a) {
      const double w = mu[s] * pi(s, a);
      if (w == 0.0) continue;
      game.transition_into(s, a, mu, row.data());
      nu += w * row;
    }
  }
  return nu / nu.sum();
}

Matrix state_kernel(const GameSpec& game, const Policy& pi, const Vector& mu) {
  game.check_distribution(mu);
  game.check_policy(pi);
  const int S = game.num_states();
  Matrix P = Matrix::Zero(S, S);
  Vector row(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < game.num_actions(); ++a) {
      if (pi(s, a) == 0.0) continue;
      game.transition_into(s, a, mu, row.data());
      P.row(s) += pi(s, a) * row.transpose();
    }
  }
  return P;
}

int stable_population_iteration_cap(double l_pop_mu, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (l_pop_mu >= 1.0) throw ContractionViolation("L_pop_mu", l_pop_mu);
  if (l_pop_mu <= 0.0 || tol >= 2.0) return 1;
  return std::max(
      1, static_cast<int>(std::ceil(std::log(2.0 / tol) /
                                    std::log(1.0 / l_pop_mu))));
}

Vector stable_population(const GameSpec& game, const Policy& pi, double tol) {
  game.check_policy(pi);
  const int cap = stable_population_iteration_cap(game.L_pop_mu(), tol);
  Vector mu = uniform_distribution(game.num_states());
  if (game.num_states() == 1) return mu;
  // Consecutive differences shrink like 2 L^k, so cap + 1 updates suffice.
  for (int k = 0; k <= cap; ++k) {
    Vector next = pop_update(game, mu, pi);
    const double step = l1_distance(next, mu);
    mu = std::move(next);
    if (step <= tol) return mu;
  }
  std::ostringstream os;
  os << "stable_population: no convergence within " << cap + 1
     << " iterations; declared L_pop_mu may be unsound";
  throw SolverFailure(os.str());
}

}  // namespace mfpma
