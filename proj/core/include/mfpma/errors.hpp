// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mfpma {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of policies, distributions or Q-tables disagree with the game.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value lies outside its mathematical domain (negative probability,
// gamma outside (0,1), non-positive tau, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A contraction constant required by an operation is >= 1.
class ContractionViolation : public Error {
 public:
  ContractionViolation(std::string constant, double value);
  const std::string& constant() const { return constant_; }
  double value() const { return value_; }

 private:
  std::string constant_;
  double value_;
};

// An iterative numerical routine failed to reach its tolerance.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Powers of the state chain never reached the requested minimum entry.
class MixingCertificationFailure : public Error {
 public:
  using Error::Error;
};

// A theoretical constant is infinite or undefined for the given inputs
// (e.g. epsilon <= 0 or L_Gamma_eta >= 1 when a schedule is requested).
class InfeasibleConstant : public Error {
 public:
  using Error::Error;
};

}  // namespace mfpma
