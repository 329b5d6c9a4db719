// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/errors.hpp"

#include <sstream>
#include <utility>

namespace mfpma {
namespace {

std::string ContractionMessage(const std::string& constant, double value) {
  std::ostringstream os;
  os << "contraction violated: " << constant << " = " << value
     << " (must be < 1)";
  return os.str();
}

}  // namespace

ContractionViolation::ContractionViolation(std::string constant, double value)
    : Error(ContractionMessage(constant, value)),
      constant_(std::move(constant)),
      value_(value) {}

}  // namespace mfpma
