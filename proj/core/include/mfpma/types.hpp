// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace mfpma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Rows are states, columns are actions.
using QFunction = Matrix;

// Probability vectors within this tolerance of the simplex are clipped and
// renormalized; anything further off is rejected.
inline constexpr double kProbTolerance = 1e-12;

// Projects a near-probability vector onto the simplex in place. Throws
// DomainError when an entry is below -tol or the sum is off by more than tol.
void normalize_probabilities(Eigen::Ref<Vector> p, double tol = kProbTolerance);

// Returns a validated copy of `mu` as a distribution over states.
Vector make_distribution(Vector mu, double tol = kProbTolerance);

Vector uniform_distribution(int n);

// Stationary policy pi(a|s) stored as a |S| x |A| row-stochastic matrix.
class Policy {
 public:
  Policy() = default;
  explicit Policy(Matrix probs, double tol = kProbTolerance);

  static Policy uniform(int num_states, int num_actions);

  int num_states() const { return static_cast<int>(probs_.rows()); }
  int num_actions() const { return static_cast<int>(probs_.cols()); }
  const Matrix& probs() const { return probs_; }
  double operator()(int s, int a) const { return probs_(s, a); }
  Vector row(int s) const { return probs_.row(s).transpose(); }

  void set_row(int s, const Vector& row, double tol = kProbTolerance);

  double min_probability() const { return probs_.minCoeff(); }

  friend bool operator==(const Policy& a, const Policy& b) {
    return a.probs_ == b.probs_;
  }

 private:
  Matrix probs_;
};

// max_s || pi(s) - pi'(s) ||_1
double policy_distance(const Policy& a, const Policy& b);

double l1_distance(const Vector& a, const Vector& b);

double sup_norm(const Matrix& q);

}  // namespace mfpma
