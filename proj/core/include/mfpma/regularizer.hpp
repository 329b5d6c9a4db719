// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "mfpma/types.hpp"

namespace mfpma {

enum class RegularizerKind { kEntropy, kQuadratic };

// Strongly concave h >= 0 on the action simplex.
//   entropy:    -tau * sum u log u
//   quadratic:  tau * (1 - ||u||^2) * |A| / (|A| - 1)     (0 when |A| = 1)
class Regularizer {
 public:
  static Regularizer entropy(double tau);
  static Regularizer quadratic(double tau);

  RegularizerKind kind() const { return kind_; }
  double tau() const { return tau_; }
  std::string name() const;

  // Requires u in the simplex (within kProbTolerance).
  double value(const Vector& u) const;
  // Unchecked evaluation used on hot paths.
  double value_unchecked(const double* u, int n) const;
  // Gradient on the interior; entropy clamps entries to 1e-15 first.
  Vector gradient(const Vector& u) const;

  double h_max(int num_actions) const;
  Vector u_max(int num_actions) const;
  // Strong-concavity modulus with respect to ||.||_1 on the simplex.
  double rho(int num_actions) const;

  // Coefficient of -||u||^2 in h (quadratic only).
  double quadratic_scale(int num_actions) const;

 private:
  Regularizer(RegularizerKind kind, double tau) : kind_(kind), tau_(tau) {}
  RegularizerKind kind_;
  double tau_;
};

inline constexpr double kNoLevelConstraint =
    std::numeric_limits<double>::infinity();

// True iff h(u) >= h_max - delta_h - 1e-12.
bool level_set_contains(const Regularizer& h, double delta_h, const Vector& u);

// True iff U_{delta_h} is the whole simplex.
bool level_set_is_full(const Regularizer& h, int num_actions, double delta_h);

// h_max / (1 - gamma)
double regularization_bias_bound(const Regularizer& h, int num_actions,
                                 double gamma);

struct PeCertificate {
  bool holds = false;
  double p_inf = 0.0;   // certified floor when holds
  double grid_min = 0;  // smallest entry observed on the certification grid
};

// Persistence of excitation for the mirror step with the given eta and
// level threshold. Entropy always holds; quadratic checks the boundary-shell
// criterion  liminf grad h(u)^T (u_max - u) > q_max + 4/eta  unless the level
// set is bounded away from the simplex boundary. The floor p_inf is 0.9x the
// smallest mirror output seen over a grid of prox centres (step 0.05) and
// q-vectors (corners of [0,q_max]^|A| plus 1000 random draws).
PeCertificate certify_pe(const Regularizer& h, int num_actions, double eta,
                         double q_max,
                         double delta_h = kNoLevelConstraint,
                         std::uint64_t seed = 0x5eed);

// Lipschitz constant of h w.r.t. ||.||_1 on {u in simplex : u >= p_inf},
// i.e. the largest half-spread of grad h over that set.
double gradient_bound(const Regularizer& h, int num_actions, double p_inf);

}  // namespace mfpma
