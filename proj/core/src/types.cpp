// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/types.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "mfpma/errors.hpp"

namespace mfpma {

void normalize_probabilities(Eigen::Ref<Vector> p, double tol) {
  if (p.size() == 0) throw DimensionError("empty probability vector");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -tol) {
      std::ostringstream os;
      os << "invalid probability entry " << p[i] << " at index " << i;
      throw DomainError(os.str());
    }
    if (p[i] < 0.0) p[i] = 0.0;
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << ", off by more than " << tol;
    throw DomainError(os.str());
  }
  p /= sum;
}

Vector make_distribution(Vector mu, double tol) {
  normalize_probabilities(mu, tol);
  return mu;
}

Vector uniform_distribution(int n) {
  if (n <= 0) throw DimensionError("distribution needs at least one state");
  return Vector::Constant(n, 1.0 / n);
}

Policy::Policy(Matrix probs, double tol) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) {
    throw DimensionError("policy must have at least one state and action");
  }
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    Vector row = probs_.row(s).transpose();
    normalize_probabilities(row, tol);
    probs_.row(s) = row.transpose();
  }
}

Policy Policy::uniform(int num_states, int num_actions) {
  if (num_states <= 0 || num_actions <= 0) {
    throw DimensionError("policy must have at least one state and action");
  }
  return Policy(Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

void Policy::set_row(int s, const Vector& row, double tol) {
  if (s < 0 || s >= num_states() || row.size() != num_actions()) {
    throw DimensionError("policy row shape mismatch");
  }
  Vector r = row;
  normalize_probabilities(r, tol);
  probs_.row(s) = r.transpose();
}

double policy_distance(const Policy& a, const Policy& b) {
  if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) {
    throw DimensionError("policy_distance: shape mismatch");
  }
  return (a.probs() - b.probs()).cwiseAbs().rowwise().sum().maxCoeff();
}

double l1_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("l1_distance: size mismatch");
  return (a - b).cwiseAbs().sum();
}

double sup_norm(const Matrix& q) {
  return q.size() == 0 ? 0.0 : q.cwiseAbs().maxCoeff();
}

}  // namespace mfpma
