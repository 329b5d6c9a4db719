// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfpma/regularizer.hpp"
#include "mfpma/types.hpp"

namespace mfpma {

struct MirrorSolution {
  Vector u;
  double objective = 0.0;
  // Multiplier of the level-set constraint (0 when inactive).
  double multiplier = 0.0;
  // Stationarity residual of the KKT system in ||.||_inf; with strong
  // concavity modulus m the objective gap is at most residual^2 / (2m).
  double residual = 0.0;
};

// argmax over U_{delta_h} of <u, q> + h(u) - ||u - centre||_2^2 / (2 eta).
// The level constraint is handled through its multiplier (bisection on
// lambda >= 0); for fixed lambda the simplex problem is solved exactly
// (Lambert-W coordinates with a Newton search on the simplex multiplier for
// entropy, a sorted simplex projection for the quadratic).
MirrorSolution solve_mirror(const Vector& q, const Vector& centre, double eta,
                            const Regularizer& h,
                            double delta_h = kNoLevelConstraint,
                            double tol = 1e-10);

double mirror_objective(const Vector& u, const Vector& q, const Vector& centre,
                        double eta, const Regularizer& h);

// Row-wise mirror step Gamma^md_eta(q, pi).
Policy pma_step(const QFunction& q, const Policy& pi, double eta,
                const Regularizer& h, double delta_h = kNoLevelConstraint,
                double tol = 1e-10);

struct ConcaveSolution {
  Vector u;
  double value = 0.0;
};

// max over the simplex of <u, q> + h(u).
ConcaveSolution solve_concave_simplex(const Vector& q, const Regularizer& h);

// Euclidean projection onto the simplex (sort-based).
Vector project_simplex(const Vector& y);

// Euclidean projection onto U_{delta_h}.
Vector project_level_set(const Vector& y, const Regularizer& h,
                         double delta_h);

// Solves w + log(w) = z for w > 0, i.e. w = W(exp(z)).
double wright_omega(double z);

}  // namespace mfpma
