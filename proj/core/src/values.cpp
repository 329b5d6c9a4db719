// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfpma/errors.hpp"
#include "mfpma/exact.hpp"
#include "mfpma/mirror.hpp"

namespace mfpma {
namespace {

// Q - (r + h_pi + gamma P^{pi,mu} Q), computed with the dense operator.
Vector bellman_gap(const Matrix& lhs, const Vector& rhs, const Vector& q) {
  return lhs * q - rhs;
}

}  // namespace

double q_max(const GameSpec& game, const Regularizer& h) {
  return (1.0 + h.h_max(game.num_actions())) / (1.0 - game.gamma());
}

ValueFunctions value_functions(const GameSpec& game, const Policy& pi,
                               const Vector& mu, const Regularizer& h,
                               double residual_tol) {
  game.check_policy(pi);
  game.check_distribution(mu);
  const int S = game.num_states();
  const int A = game.num_actions();
  const int n = S * A;
  const double gamma = game.gamma();

  Vector h_pi(S);
  for (int s = 0; s < S; ++s) {
    h_pi[s] = h.value_unchecked(pi.probs().row(s).eval().data(), A);
  }

  Matrix lhs = Matrix::Identity(n, n);
  Vector rhs(n);
  Vector row(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const int i = s * A + a;
      rhs[i] = game.reward(s, a, mu) + h_pi[s];
      game.transition_into(s, a, mu, row.data());
      for (int s2 = 0; s2 < S; ++s2) {
        if (row[s2] == 0.0) continue;
        for (int a2 = 0; a2 < A; ++a2) {
          lhs(i, s2 * A + a2) -= gamma * row[s2] * pi(s2, a2);
        }
      }
    }
  }

  Eigen::PartialPivLU<Matrix> lu(lhs);
  Vector q = lu.solve(rhs);
  Vector gap = bellman_gap(lhs, rhs, q);
  if (gap.cwiseAbs().maxCoeff() > 1e-13) {
    q -= lu.solve(gap);  // one step of iterative refinement
    gap = bellman_gap(lhs, rhs, q);
  }
  const double residual = gap.cwiseAbs().maxCoeff();
  if (!(residual <= residual_tol)) {
    std::ostringstream os;
    os << "value_functions: Bellman residual " << residual;
    throw SolverFailure(os.str());
  }

  ValueFunctions out;
  out.Q.resize(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) out.Q(s, a) = q[s * A + a];
  }
  out.q = out.Q.colwise() - h_pi;
  out.V = (pi.probs().cwiseProduct(out.Q)).rowwise().sum();
  return out;
}

QFunction gamma_q(const GameSpec& game, const Policy& pi, const Vector& mu,
                  const Regularizer& h) {
  return value_functions(game, pi, mu, h).q;
}

Vector optimal_values(const GameSpec& game, const Regularizer& h,
                      const Vector& mu, double tol) {
  game.check_distribution(mu);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const int S = game.num_states();
  const int A = game.num_actions();
  const double gamma = game.gamma();

  Matrix r(S, A);
  std::vector<Matrix> P(A, Matrix(S, S));
  Vector row(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      r(s, a) = game.reward(s, a, mu);
      game.transition_into(s, a, mu, row.data());
      P[a].row(s) = row.transpose();
    }
  }

  // ||V_k - V*|| <= gamma/(1-gamma) ||V_k - V_{k-1}||.
  const double stop = tol * (1.0 - gamma) / gamma;
  const int cap = 10 + static_cast<int>(std::ceil(
                           std::log(stop / (2.0 * q_max(game, h) + 1.0)) /
                           std::log(gamma)));
  Vector V = Vector::Zero(S);
  Vector q_row(A);
  for (int it = 0; it < std::max(cap, 10); ++it) {
    Vector next(S);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        q_row[a] = r(s, a) + gamma * P[a].row(s).dot(V);
      }
      next[s] = solve_concave_simplex(q_row, h).value;
    }
    const double diff = (next - V).cwiseAbs().maxCoeff();
    V = std::move(next);
    if (diff <= stop) return V;
  }
  throw SolverFailure("optimal_values: soft value iteration did not converge");
}

ExploitabilityReport exploitability_report(const GameSpec& game,
                                           const Regularizer& h,
                                           const Policy& pi, double tol) {
  ExploitabilityReport rep;
  rep.mu = stable_population(game, pi, tol);
  const Vector v_pi = value_functions(game, pi, rep.mu, h).V;
  const Vector v_star = optimal_values(game, h, rep.mu, tol * 1e-2);
  const Vector gap = v_star - v_pi;
  rep.weighted = std::max(0.0, rep.mu.dot(gap));
  rep.max_state = std::max(0.0, gap.maxCoeff());
  return rep;
}

double exploitability(const GameSpec& game, const Regularizer& h,
                      const Policy& pi, double tol) {
  return exploitability_report(game, h, pi, tol).weighted;
}

}  // namespace mfpma
