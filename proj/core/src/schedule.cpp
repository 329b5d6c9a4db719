// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "mfpma/errors.hpp"
#include "mfpma/learn.hpp"

namespace mfpma {
namespace {

// Smallest integer strictly greater than x.
double above(double x) { return std::floor(x) + 1.0; }

// log(arg) / log(1 / L_pop_mu), with the L_pop_mu = 0 case mapped to 0.
double pop_steps(double arg, double l_pop) {
  if (l_pop <= 0.0 || !(arg > 0.0)) return 0.0;
  return std::log(arg) / std::log(1.0 / l_pop);
}

}  // namespace

TheoreticalSchedule theoretical_schedule(const ConstantsLedger& c,
                                         double epsilon, Regime regime) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!c.contraction_ok) {
    throw ContractionViolation("L_Gamma_eta", c.L_Gamma_eta);
  }
  if (!c.has_mixing) {
    throw InfeasibleConstant("schedule needs mixing parameters in the ledger");
  }
  const double lg = c.L_Gamma_eta;
  const double lq = c.L_md_q;
  const double eps = epsilon;
  const CtdConstants& k = c.ctd;

  TheoreticalSchedule out;
  out.K = lg > 0.0 ? above(std::log(8.0 / eps) / std::log(1.0 / lg)) : 1.0;
  out.K = std::max(out.K, 1.0);

  double mtd = 0.0;
  double mpg = 0.0;
  if (regime == Regime::kCentralized) {
    out.branch = "centralized";
    mtd = pop_steps(4.0 / (1.0 - lg) * lq * k.Cpop1 / eps, c.L_pop_mu);
    mpg = std::max(4.0 * k.C1 * lq / ((1.0 - lg) * eps),
                   16.0 * k.C2 * k.C2 * lq * lq /
                       ((1.0 - lg) * (1.0 - lg) * eps * eps));
  } else {
    const double ce = c.c_eta;
    if (std::abs(ce - 1.0) <= 1e-12) {
      out.branch = "c_eta=1";
      const double b = 1.0 + k.Cpol1 * lq * out.K;
      mtd = pop_steps(4.0 / (1.0 - lg) * lq * k.Cpop1 / eps * b, c.L_pop_mu);
      mpg = 4.0 * std::max(lq * k.C1 / (1.0 - lg) * b / eps,
                           4.0 * k.C2 * k.C2 * lq * lq /
                               ((1.0 - lg) * (1.0 - lg)) * b * b /
                               (eps * eps));
    } else if (ce < 1.0) {
      out.branch = "c_eta<1";
      const double a =
          (lq + lq * lq * k.Cpop1) / ((1.0 - ce) * (1.0 - lg));
      mtd = pop_steps(4.0 * a / eps, c.L_pop_mu);
      mpg = 4.0 * a *
            std::max(k.C1 / eps, k.C2 * k.C2 / ((1.0 - lg) * eps * eps));
    } else {
      out.branch = "c_eta>1";
      const double d =
          1.0 + k.Cpol1 * lq / (ce - 1.0) * std::pow(ce, out.K);
      mtd = pop_steps(4.0 / (1.0 - lg) * lq * k.Cpop1 * d / eps, c.L_pop_mu);
      mpg = 4.0 / ((1.0 - lg) * (1.0 - lg)) * lq *
            std::max(k.C1 / eps, 4.0 * (k.C2 * lq) * (k.C2 * lq) /
                                     (eps * eps)) *
            d * d;
    }
  }
  out.M_td = std::max(2.0, above(std::max(mtd, c.M_td_min)));
  out.M_pg = std::max(1.0, above(mpg));
  return out;
}

double deviation_recursion_bound(double c_eta, double l_md_q, double eps_td,
                                 int k) {
  if (k < 0) throw DomainError("k must be nonnegative");
  if (std::abs(c_eta - 1.0) < 1e-12) return k * l_md_q * eps_td;
  return (std::pow(c_eta, k) - 1.0) / (c_eta - 1.0) * l_md_q * eps_td;
}

}  // namespace mfpma
