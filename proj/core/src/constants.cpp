// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfpma/errors.hpp"
#include "mfpma/exact.hpp"

namespace mfpma {
namespace {

// Floor for the level threshold when every Lipschitz constant of the
// reward in the action vanishes (then pi* = pi_max and any small set works).
constexpr double kMinLevelThreshold = 1e-9;

void require_finite(const char* name, double v) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << name << " = " << v;
    throw InfeasibleConstant(os.str());
  }
}

}  // namespace

double level_threshold(const GameSpec& game) {
  const auto& m = game.meta();
  const double g = game.gamma();
  return m.L_a + g * m.L_s * m.K_a / (2.0 - g * m.K_s);
}

ConstantsLedger compute_constants(const GameSpec& game, const Regularizer& h,
                                  double eta,
                                  std::optional<MixingParams> mixing,
                                  std::optional<double> delta_h) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  const auto& m = game.meta();
  const double g = game.gamma();
  const int S = game.num_states();
  const int A = game.num_actions();

  ConstantsLedger c;
  c.gamma = g;
  c.eta = eta;
  c.num_states = S;
  c.num_actions = A;
  c.L_pop_mu = game.L_pop_mu();
  if (c.L_pop_mu >= 1.0) throw ContractionViolation("L_pop_mu", c.L_pop_mu);
  c.L_pop_inf = m.K_a / (2.0 * (1.0 - c.L_pop_mu));
  c.L_h = level_threshold(game);
  if (delta_h) {
    if (!(*delta_h > 0.0)) throw DomainError("delta_h must be positive");
    c.delta_h = *delta_h;
  } else {
    c.delta_h = std::max(c.L_h, kMinLevelThreshold);
  }

  c.rho = h.rho(A);
  c.h_max = h.h_max(A);
  c.q_max = q_max(game, h);

  c.L_Vs = (m.L_s + m.L_a + c.delta_h) /
           (1.0 - g * std::min(1.0, 0.5 * (m.K_s + m.K_a)));
  c.L_Vpi = (4.0 * m.L_a + g * m.K_a * c.L_Vs) / (4.0 * (1.0 - g));
  c.L_Vmu = (2.0 * m.L_mu + g * m.K_mu * c.L_Vs) / (2.0 * (1.0 - g));
  c.L_qmu = m.L_mu + g * c.L_Vmu + g * c.L_Vs * m.K_mu / 2.0;
  c.L_qpi = g * c.L_Vpi + g * c.L_Vs * m.K_a;
  c.L_Gamma_q = c.L_pop_inf * c.L_qmu + c.L_qpi;

  if (c.rho <= 0.0) throw InfeasibleConstant("rho = 0 (single action)");
  if (std::isinf(eta)) {
    c.L_md_q = 1.0 / c.rho;
    c.L_md_pi = 0.0;
  } else {
    c.L_md_q = eta * A / (1.0 + eta * c.rho * A);
    c.L_md_pi = 1.0 / (1.0 / A + eta * c.rho);
  }
  c.L_Gamma_eta = c.L_Gamma_q * c.L_md_q + c.L_md_pi;
  c.contraction_ok = c.L_Gamma_eta < 1.0;

  if (!mixing) return c;

  const MixingParams& mix = *mixing;
  if (mix.T_mix < 1) throw DomainError("T_mix must be >= 1");
  if (!(mix.delta_mix > 0.0 && mix.delta_mix <= 1.0)) {
    throw DomainError("delta_mix must lie in (0, 1]");
  }
  if (!(mix.p_inf > 0.0 && mix.p_inf <= 1.0 / A + 1e-12)) {
    throw DomainError("p_inf must lie in (0, 1/|A|]");
  }
  c.has_mixing = true;
  c.mixing = mix;

  const double T = mix.T_mix;
  const double dm = mix.delta_mix;
  const double p = mix.p_inf;
  const double lh1 = 1.0 + c.L_h;
  const double omg = 1.0 - g;

  c.mu_F = omg * dm * p;
  c.t0 = 16.0 * (1.0 + g) * (1.0 + g) / (c.mu_F * c.mu_F);

  const double x = std::pow(1.0 - dm, 1.0 / T);
  c.rho_mix = std::max(c.L_pop_mu, x);
  const double gap = std::abs(c.L_pop_mu - x);
  if (gap == 0.0 || c.rho_mix == 0.0) {
    throw InfeasibleConstant("C_mix: L_pop_mu equals (1 - delta_mix)^(1/T_mix)");
  }
  c.C_mix = 4.0 * T * std::max(m.K_mu, 1.0) /
            (dm * std::pow(c.rho_mix, T) * gap);
  c.M_td_min = (std::log(1.0 / c.mu_F) + std::log(40.0 * c.C_mix)) /
               std::log(1.0 / c.rho_mix);

  CtdConstants& k = c.ctd;
  k.C_h = gradient_bound(h, A, p);
  k.C1 = 2.0 * lh1 * (c.t0 + 2.0) * S * A / omg;
  k.C2 = 16.0 * lh1 / (omg * omg * dm * p);
  k.Cpop1 = 20.0 * (m.K_mu + m.L_mu) * lh1 / (omg * omg * dm * p);
  k.Cpop2 = 10.0 * (9.0 * m.K_mu + m.L_mu) * lh1 * T * std::sqrt(2.0 * S) /
            ((1.0 - c.L_pop_mu) * omg * omg * dm * dm * dm * p);
  k.Cpol1 = 5.0 * T * lh1 * (m.K_mu + m.L_mu + 8.0 * m.K_a * m.K_mu) /
            ((1.0 - c.L_pop_mu) * omg * omg * dm * dm * dm * p);
  k.Cpol2 = 40.0 * lh1 * m.K_a * T / (omg * omg * dm * dm * p) +
            (20.0 * k.C_h + 10.0 * c.L_h) / (omg * dm * p);
  c.c_eta = c.L_md_q * (k.Cpol1 + k.Cpol2) + c.L_md_pi;

  require_finite("C_mix", c.C_mix);
  require_finite("t0", c.t0);
  require_finite("C_h", k.C_h);
  return c;
}

}  // namespace mfpma
