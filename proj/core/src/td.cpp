// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/errors.hpp"
#include "mfpma/learn.hpp"

namespace mfpma {

TdDelta stochastic_td_operator(const QFunction& Q, const Transition& z,
                               const Policy& pi, const Regularizer& h,
                               double gamma) {
  const int S = static_cast<int>(Q.rows());
  const int A = static_cast<int>(Q.cols());
  if (pi.num_states() != S || pi.num_actions() != A) {
    throw DimensionError("policy and Q shapes differ");
  }
  if (z.s < 0 || z.s >= S || z.s_next < 0 || z.s_next >= S || z.a < 0 ||
      z.a >= A || z.a_next < 0 || z.a_next >= A) {
    throw DomainError("transition index out of range");
  }
  const Vector row = pi.row(z.s);
  const double h_s = h.value_unchecked(row.data(), A);
  return {z.s, z.a,
          Q(z.s, z.a) - z.r - h_s - gamma * Q(z.s_next, z.a_next)};
}

QFunction bellman_operator(const GameSpec& game, const QFunction& Q,
                           const Policy& pi, const Vector& mu,
                           const Regularizer& h) {
  game.check_q(Q);
  game.check_policy(pi);
  game.check_distribution(mu);
  const int S = game.num_states();
  const int A = game.num_actions();
  // V(s') = sum_a' pi(a'|s') Q(s',a')
  const Vector v = pi.probs().cwiseProduct(Q).rowwise().sum();
  QFunction out(S, A);
  Vector row(S);
  for (int s = 0; s < S; ++s) {
    const Vector p = pi.row(s);
    const double h_s = h.value_unchecked(p.data(), A);
    for (int a = 0; a < A; ++a) {
      game.transition_into(s, a, mu, row.data());
      out(s, a) = game.reward(s, a, mu) + h_s + game.gamma() * row.dot(v);
    }
  }
  return out;
}

QFunction expected_td_operator(const GameSpec& game, const QFunction& Q,
                               const Policy& pi, const Vector& mu,
                               const Regularizer& h) {
  const QFunction gap = Q - bellman_operator(game, Q, pi, mu, h);
  QFunction out = gap;
  for (int s = 0; s < game.num_states(); ++s) {
    for (int a = 0; a < game.num_actions(); ++a) {
      out(s, a) *= mu[s] * pi(s, a);
    }
  }
  return out;
}

double StepSchedule::operator()(long m) const {
  if (m < 1) throw DomainError("step index starts at 1");
  const double d = modulus * (t0 + static_cast<double>(m) - 1.0);
  if (!(d > 0.0)) throw DomainError("step size denominator must be positive");
  return 2.0 / d;
}

}  // namespace mfpma
