// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include "mfpma/errors.hpp"
#include "mfpma/exact.hpp"

namespace mfpma {

namespace {
constexpr int kMaxMixingPower = 10000;
}

MixingParams estimate_mixing(const GameSpec& game, const Policy& pi,
                             const Vector& mu, double target_delta,
                             double p_inf) {
  if (!(target_delta > 0.0 && target_delta <= 1.0)) {
    throw DomainError("target delta_mix must lie in (0, 1]");
  }
  const Matrix P = state_kernel(game, pi, mu);
  Matrix power = P;
  for (int T = 1; T <= kMaxMixingPower; ++T) {
    const double m = power.minCoeff();
    if (m >= target_delta) return MixingParams{T, m, p_inf};
    power = power * P;
  }
  std::ostringstream os;
  os << "no power of P_pi up to " << kMaxMixingPower
     << " has all entries >= " << target_delta;
  throw MixingCertificationFailure(os.str());
}

int practical_mtd(const MixingParams& mix, double l_pop_mu, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw DomainError("target must lie in (0, 1)");
  }
  if (mix.T_mix < 1) throw DomainError("T_mix must be >= 1");
  if (l_pop_mu >= 1.0) throw ContractionViolation("L_pop_mu", l_pop_mu);
  const double chain = 1.0 - mix.delta_mix;
  for (int M = 2; M < 100000000; ++M) {
    const bool chain_ok = std::pow(chain, M / mix.T_mix) <= target;
    const bool pop_ok = std::pow(l_pop_mu, M) <= target;
    if (chain_ok && pop_ok) return M;
  }
  throw InfeasibleConstant("practical M_td exceeds 1e8");
}

}  // namespace mfpma
