// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

// Slow, independent reference computations used only by the tests. None of
// these call into the solvers they are checking.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mfpma/exact.hpp"
#include "mfpma/game.hpp"
#include "mfpma/regularizer.hpp"
#include "mfpma/types.hpp"

namespace mfpma::testing {

inline Vector random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

inline Policy random_policy(std::mt19937_64& rng, int S, int A) {
  Matrix m(S, A);
  for (int s = 0; s < S; ++s) m.row(s) = random_simplex(rng, A).transpose();
  return Policy(m);
}

// Policy whose rows all lie in U_{delta_h}: move a random row toward u_max
// until it is contained.
inline Policy random_level_policy(std::mt19937_64& rng, const Regularizer& h,
                                  double delta_h, int S, int A) {
  const Vector um = h.u_max(A);
  Matrix m(S, A);
  for (int s = 0; s < S; ++s) {
    Vector v = random_simplex(rng, A);
    double t = 1.0;
    while (!level_set_contains(h, delta_h * 0.999, um + t * (v - um))) t *= 0.8;
    m.row(s) = (um + t * (v - um)).transpose();
  }
  return Policy(m);
}

// Random tabular game with mu-independent P and R. Rows are
// (1 - lambda) nu + lambda w with a shared nu, so any two rows are within
// 2 lambda in l1 and L_pop_mu = 2 lambda.
inline GameSpec random_tabular_game(std::mt19937_64& rng, int S, int A,
                                    double gamma, double lambda = 0.4) {
  auto P = std::make_shared<std::vector<Vector>>();
  auto R = std::make_shared<std::vector<double>>();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vector nu = random_simplex(rng, S);
  for (int i = 0; i < S * A; ++i) {
    P->push_back((1.0 - lambda) * nu + lambda * random_simplex(rng, S));
    R->push_back(u(rng));
  }
  LipschitzMetadata meta;
  meta.K_mu = 0.0;
  meta.K_s = meta.K_a = 2.0 * lambda;
  meta.L_mu = 0.0;
  return make_game(
      S, A, gamma, meta,
      [P, A](int s, int a, const Vector&) { return (*P)[s * A + a]; },
      [R, A](int s, int a, const Vector&) { return (*R)[s * A + a]; });
}

// Q by plain fixed-point sweeps of the regularized Bellman equation.
inline QFunction value_iteration(const GameSpec& g, const Policy& pi,
                                 const Vector& mu, const Regularizer& h,
                                 int sweeps) {
  const int S = g.num_states(), A = g.num_actions();
  std::vector<Vector> P;
  Matrix R(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      P.push_back(g.transition(s, a, mu));
      R(s, a) = g.reward(s, a, mu);
    }
  Vector hp(S);
  for (int s = 0; s < S; ++s) hp[s] = h.value(pi.row(s));
  QFunction Q = QFunction::Zero(S, A);
  for (int k = 0; k < sweeps; ++k) {
    Vector V = (pi.probs().array() * Q.array()).rowwise().sum();
    QFunction next(S, A);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        next(s, a) = R(s, a) + hp[s] + g.gamma() * P[s * A + a].dot(V);
    Q = next;
  }
  return Q;
}

// Stationary law of a row-stochastic matrix via the eigenvector of P^T with
// the eigenvalue closest to 1.
inline Vector stationary_distribution(const Matrix& P) {
  Eigen::EigenSolver<Matrix> es(P.transpose());
  int best = 0;
  for (int i = 1; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()[i] - 1.0) <
        std::abs(es.eigenvalues()[best] - 1.0))
      best = i;
  }
  Vector v = es.eigenvectors().col(best).real();
  return v / v.sum();
}

inline Matrix state_matrix(const GameSpec& g, const Policy& pi,
                           const Vector& mu) {
  const int S = g.num_states();
  Matrix P = Matrix::Zero(S, S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < g.num_actions(); ++a)
      P.row(s) += pi(s, a) * g.transition(s, a, mu).transpose();
  return P;
}

// Best point of the two-action mirror objective on a uniform grid.
inline Vector mirror_grid_2(const Vector& q, const Vector& centre, double eta,
                            const Regularizer& h, double delta_h,
                            double step) {
  const auto obj = [&](double x) {
    Vector u(2);
    u << x, 1.0 - x;
    if (!level_set_contains(h, delta_h, u)) return -HUGE_VAL;
    return u.dot(q) + h.value(u) - (u - centre).squaredNorm() / (2 * eta);
  };
  const long n = std::lround(1.0 / step);
  double best = -INFINITY, arg = 0.5;
  for (long i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    const double v = obj(x);
    if (v > best) best = v, arg = x;
  }
  Vector u(2);
  u << arg, 1.0 - arg;
  return u;
}

// Three actions. The unconstrained problem is solved by nested grids on the
// 2-simplex, each 21x21 pass centred on the previous best with a tenth of its
// step, down to `step`. If that point leaves the level set the optimum lies on
// the level curve, which is searched by angle around the maximizer (the curve
// point on each ray found by bisection), again with nested refinement.
inline Vector mirror_grid_3(const Vector& q, const Vector& centre, double eta,
                            const Regularizer& h, double delta_h,
                            double step) {
  const auto objective = [&](const Vector& u) {
    return u.dot(q) + h.value(u) - (u - centre).squaredNorm() / (2 * eta);
  };
  const auto obj = [&](double x, double y) {
    if (x < 0 || y < 0 || x + y > 1) return -HUGE_VAL;
    Vector u(3);
    u << x, y, std::max(0.0, 1.0 - x - y);
    return objective(u);
  };
  double bx = 1.0 / 3, by = 1.0 / 3, best = -HUGE_VAL;
  const int n0 = 200;
  for (int i = 0; i <= n0; ++i)
    for (int j = 0; i + j <= n0; ++j) {
      const double v = obj(double(i) / n0, double(j) / n0);
      if (v > best) best = v, bx = double(i) / n0, by = double(j) / n0;
    }
  for (double d = 1.0 / n0; d > step * 0.5; d /= 10.0) {
    const double cx = bx, cy = by, fine = d / 10.0;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        const double x = cx + i * fine, y = cy + j * fine;
        const double v = obj(x, y);
        if (v > best) best = v, bx = x, by = y;
      }
  }
  Vector u(3);
  u << bx, by, 1.0 - bx - by;
  if (level_set_contains(h, delta_h, u)) return u;

  const Vector um = h.u_max(3);
  const double level = h.value(um) - delta_h;
  const double pi = std::acos(-1.0);
  // Point of the level curve on the ray at angle theta, if inside the simplex.
  const auto curve = [&](double theta, Vector& out) {
    Vector d(3);
    d << std::cos(theta) / std::sqrt(2.0) + std::sin(theta) / std::sqrt(6.0),
        -std::cos(theta) / std::sqrt(2.0) + std::sin(theta) / std::sqrt(6.0),
        -2 * std::sin(theta) / std::sqrt(6.0);
    double r_max = HUGE_VAL;
    for (int i = 0; i < 3; ++i)
      if (d[i] < 0) r_max = std::min(r_max, -um[i] / d[i]);
    const auto at = [&](double r) {
      Vector v = (um + r * d).cwiseMax(0.0);
      return Vector(v / v.sum());
    };
    if (h.value(at(r_max)) >= level) return false;
    double lo = 0, hi = r_max;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h.value(at(mid)) >= level ? lo : hi) = mid;
    }
    out = at(lo);
    return true;
  };
  double bt = 0;
  best = -HUGE_VAL;
  Vector v;
  const int m0 = 20000;
  for (int i = 0; i < m0; ++i) {
    const double t = 2 * pi * i / m0;
    if (curve(t, v) && objective(v) > best) best = objective(v), bt = t;
  }
  for (double d = 2 * pi / m0; d > step * 0.05; d /= 10.0) {
    const double c = bt, fine = d / 10.0;
    for (int i = -10; i <= 10; ++i) {
      const double t = c + i * fine;
      if (curve(t, v) && objective(v) > best) best = objective(v), bt = t;
    }
  }
  curve(bt, u);
  return u;
}

}  // namespace mfpma::testing
