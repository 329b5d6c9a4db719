// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma_tools/runner.hpp"

#include <climits>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "mfpma/exact.hpp"
#include "mfpma/learn.hpp"
#include "mfpma/parallel.hpp"
#include "mfpma/sim.hpp"
#include "mfpma/version.hpp"
#include "mfpma_tools/io.hpp"
#include "mfpma_tools/plot.hpp"

namespace mfpma::tools {
namespace {

namespace fs = std::filesystem;

// Everything derived from the config before a stochastic run.
struct Setup {
  GameSpec game;
  Regularizer h;
  ConstantsLedger ledger;  // with mixing when available
  std::optional<ExactSolution> exact;
  Policy fixed;            // policy used for mixing and fixed-policy modes
  PeCertificate pe;
  bool has_mixing = false;
  std::string mixing_error;
  int M_td = 0;
  double beta_modulus = 0;
  double t0 = 0;
};

Policy max_policy(const GameSpec& g, const Regularizer& h) {
  Matrix m(g.num_states(), g.num_actions());
  m.rowwise() = h.u_max(g.num_actions()).transpose();
  return Policy(m);
}

Setup make_setup(const ExperimentConfig& c, bool need_mixing) {
  GameSpec game = build_game(c);
  Regularizer h = build_regularizer(c);
  ConstantsLedger base = compute_constants(game, h, c.eta);
  Setup s{game, h, base, std::nullopt, max_policy(game, h), {}, false, "",
          0, 0, 0};

  if (base.contraction_ok || !c.strict) {
    ExactOptions eo;
    eo.tol = c.tol.mirror;
    eo.strict = false;
    eo.max_iterations = base.contraction_ok ? 10000 : 2000;
    ExactSolution sol = solve_exact(game, h, c.eta, eo);
    if (sol.converged) s.exact = std::move(sol);
  }
  if (c.policy == "exact") {
    if (!s.exact) {
      if (c.mode == Mode::kCtdOnly || c.mode == Mode::kBiasScaling) {
        throw Refusal("policy 'exact' needs a converged exact solution");
      }
    } else {
      s.fixed = s.exact->pi;
    }
  } else if (c.policy == "uniform") {
    s.fixed = Policy::uniform(game.num_states(), game.num_actions());
  }
  if (!need_mixing) return s;

  s.pe = certify_pe(h, game.num_actions(), c.eta, base.q_max, base.delta_h);
  const double p_inf = s.pe.holds ? s.pe.p_inf : s.fixed.min_probability();
  const double target =
      c.mixing_target > 0.0 ? c.mixing_target : 0.5 / game.num_states();
  try {
    const Vector mu = stable_population(game, s.fixed, c.tol.population);
    const MixingParams mix =
        estimate_mixing(game, s.fixed, mu, target, std::max(p_inf, 1e-300));
    s.ledger = compute_constants(game, h, c.eta, mix);
    s.has_mixing = true;
  } catch (const MixingCertificationFailure& e) {
    s.mixing_error = e.what();
  } catch (const InfeasibleConstant& e) {
    s.mixing_error = e.what();
  }
  if (s.has_mixing) {
    s.M_td = c.schedule.M_td > 0
                 ? c.schedule.M_td
                 : practical_mtd(s.ledger.mixing, s.ledger.L_pop_mu,
                                 c.schedule.mtd_target);
    if (c.schedule.beta == "mu_F") {
      s.beta_modulus = s.ledger.mu_F;
      s.t0 = c.schedule.t0.value_or(2.0 / s.ledger.mu_F);
    } else {
      s.beta_modulus = 1.0 - game.gamma();
      s.t0 = c.schedule.t0.value_or(s.ledger.t0);
    }
  }
  return s;
}

void require_learning_preconditions(const ExperimentConfig& c,
                                    const Setup& s) {
  if (c.strict && !s.ledger.contraction_ok) {
    throw ContractionViolation("L_Gamma_eta", s.ledger.L_Gamma_eta);
  }
  if (c.strict && !s.pe.holds) {
    throw Refusal("persistence of excitation not certified for eta = " +
                  std::to_string(c.eta));
  }
  if (!s.has_mixing) {
    throw MixingCertificationFailure("mixing not certified: " +
                                     s.mixing_error);
  }
}

std::string path_in(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

Json derived_json(const Setup& s) {
  return {{"M_td", s.M_td},
          {"beta_modulus", s.beta_modulus},
          {"t0", s.t0},
          {"pe_holds", s.pe.holds},
          {"p_inf", s.pe.p_inf},
          {"exact_converged", s.exact.has_value()}};
}

void write_manifest(const ExperimentConfig& c, const Setup& s) {
  Json m;
  m["manifest_version"] = 1;
  m["version"] = kVersion;
  m["mode"] = mode_name(c.mode);
  m["config"] = to_json(c);
  m["ledger"] = ledger_to_json(s.ledger);
  m["derived"] = derived_json(s);
  atomic_write(path_in(c, "manifest.json"), m.dump(2) + "\n");
}

std::string policy_text(const Policy& pi) {
  std::ostringstream os;
  write_policy_text(os, pi);
  return os.str();
}

PmaConfig pma_config(const ExperimentConfig& c, const Setup& s, int K,
                     int M_pg, int M_td) {
  PmaConfig p;
  p.K = K;
  p.M_pg = M_pg;
  p.M_td = M_td;
  p.eta = c.eta;
  p.tol_inner = c.tol.mirror;
  p.t0 = s.t0;
  p.beta_modulus = s.beta_modulus;
  p.pe_floor = s.pe.holds ? s.pe.p_inf : 0.0;
  p.strict = c.strict;
  return p;
}

Json run_training(const ExperimentConfig& c, Setup& s, std::ostream& log) {
  require_learning_preconditions(c, s);
  int K = c.schedule.K, M_pg = c.schedule.M_pg, M_td = s.M_td;
  if (c.schedule.type == "theoretical") {
    const Regime regime = c.mode == Mode::kTrainCentralized
                              ? Regime::kCentralized
                              : Regime::kIndependent;
    const TheoreticalSchedule ts =
        theoretical_schedule(s.ledger, c.schedule.epsilon, regime);
    const double steps = ts.K * ts.M_pg * ts.M_td;
    if (ts.K > INT_MAX || ts.M_pg > INT_MAX || ts.M_td > INT_MAX ||
        steps > 1e11) {
      std::ostringstream os;
      os << "theoretical schedule is beyond desk scale: K = " << ts.K
         << ", M_pg = " << ts.M_pg << ", M_td = " << ts.M_td;
      throw Refusal(os.str());
    }
    K = static_cast<int>(ts.K);
    M_pg = static_cast<int>(ts.M_pg);
    M_td = static_cast<int>(ts.M_td);
  }
  const PmaConfig pc = pma_config(c, s, K, M_pg, M_td);
  LearnOptions lo;
  if (s.exact) lo.reference = s.exact->pi;
  lo.exploitability = c.exploitability;
  lo.q_error = c.q_error;

  const bool central = c.mode == Mode::kTrainCentralized;
  const std::size_t n = c.seeds.size();
  std::vector<LearnReport> reports(n);
  std::vector<Policy> finals(n);
  std::vector<double> agreement(n, 0.0);
  log << mode_name(c.mode) << ": K=" << K << " M_pg=" << M_pg
      << " M_td=" << M_td << " N=" << c.N << " seeds=" << n << '\n';
  parallel_for(n, [&](std::size_t i) {
    if (central) {
      CentralizedResult r = centralized_pma(s.game, s.h, pc, c.N, c.seeds[i], lo);
      reports[i] = std::move(r.report);
      finals[i] = std::move(r.pi);
    } else {
      IndependentResult r =
          independent_pma(s.game, s.h, pc, c.N, c.seeds[i], lo);
      for (const Policy& p : r.pi) {
        agreement[i] = std::max(agreement[i], policy_distance(p, r.pi[0]));
      }
      reports[i] = std::move(r.report);
      finals[i] = std::move(r.pi[0]);
    }
  });

  std::ostringstream csv;
  Json per_seed = Json::array();
  double mean_dist = 0, mean_expl = 0;
  for (std::size_t i = 0; i < n; ++i) {
    write_report_csv(csv, reports[i], c.seeds[i], i == 0);
    atomic_write(path_in(c, "policy_seed" + std::to_string(c.seeds[i]) + ".txt"),
                 policy_text(finals[i]));
    Json row = {{"seed", c.seeds[i]},
                {"total_steps", reports[i].total_steps},
                {"clip_count", reports[i].clip_count},
                {"pe_violation", reports[i].pe_violation}};
    double dist = s.exact ? policy_distance(finals[i], s.exact->pi) : NAN;
    double expl = c.exploitability ? exploitability(s.game, s.h, finals[i]) : NAN;
    if (s.exact) row["dist_to_exact"] = dist;
    if (c.exploitability) row["exploitability"] = expl;
    if (!central) row["max_agent_deviation"] = agreement[i];
    mean_dist += dist / n;
    mean_expl += expl / n;
    per_seed.push_back(row);
  }
  atomic_write(path_in(c, "report.csv"), csv.str());
  Json summary = {{"mode", mode_name(c.mode)},
                  {"K", K},
                  {"M_pg", M_pg},
                  {"M_td", M_td},
                  {"seeds", per_seed}};
  if (s.exact) summary["mean_dist_to_exact"] = mean_dist;
  if (c.exploitability) summary["mean_exploitability"] = mean_expl;
  return summary;
}

Json run_solve_exact(const ExperimentConfig& c, const Setup& s) {
  ExactOptions eo;
  eo.tol = c.tol.mirror;
  eo.strict = c.strict;
  const ExactSolution sol = solve_exact(s.game, s.h, c.eta, eo);
  std::ostringstream csv;
  csv.precision(17);
  csv << "t,residual\n";
  for (std::size_t t = 0; t < sol.residuals.size(); ++t) {
    csv << t << ',' << sol.residuals[t] << '\n';
  }
  atomic_write(path_in(c, "residuals.csv"), csv.str());
  atomic_write(path_in(c, "policy.txt"), policy_text(sol.pi));
  std::ostringstream mu;
  mu.precision(17);
  mu << "s,mu\n";
  for (int i = 0; i < sol.mu.size(); ++i) mu << i << ',' << sol.mu[i] << '\n';
  atomic_write(path_in(c, "population.csv"), mu.str());
  return {{"mode", "solve_exact"},
          {"iterations", sol.residuals.size()},
          {"converged", sol.converged},
          {"final_residual", sol.residuals.empty() ? 0.0 : sol.residuals.back()},
          {"exploitability", exploitability(s.game, s.h, sol.pi)},
          {"L_Gamma_eta", s.ledger.L_Gamma_eta}};
}

Json run_ctd(const ExperimentConfig& c, const Setup& s) {
  if (!s.has_mixing) {
    throw MixingCertificationFailure("mixing not certified: " +
                                     s.mixing_error);
  }
  const Vector mu = stable_population(s.game, s.fixed, c.tol.population);
  const QFunction q_star =
      value_functions(s.game, s.fixed, mu, s.h, c.tol.value).Q;
  CtdConfig cc;
  cc.M = c.schedule.M;
  cc.M_td = s.M_td;
  cc.t0 = s.t0;
  cc.beta_modulus = s.beta_modulus;
  cc.pe_floor = s.pe.holds ? s.pe.p_inf : 0.0;
  const std::size_t n = c.seeds.size();
  std::vector<CtdResult> res(n);
  parallel_for(n, [&](std::size_t i) {
    Simulator sim(s.game, c.N, InitSpec::uniform_random(), c.seeds[i]);
    res[i] = ctd_learn(sim, s.fixed, 0, cc, s.h);
  });
  std::ostringstream csv;
  csv.precision(17);
  csv << "seed,q_error,clip_count,steps\n";
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = sup_norm(res[i].Q - q_star);
    mean += e / n;
    csv << c.seeds[i] << ',' << e << ',' << res[i].clip_count << ','
        << res[i].steps << '\n';
  }
  atomic_write(path_in(c, "ctd.csv"), csv.str());
  return {{"mode", "ctd_only"},
          {"M", c.schedule.M},
          {"M_td", s.M_td},
          {"mean_q_error", mean},
          {"q_max", s.ledger.q_max}};
}

Json run_bias(const ExperimentConfig& c, const Setup& s, std::ostream& log) {
  const BiasTable t =
      population_bias_experiment(s.game, s.fixed, c.Ns, c.T, c.seeds);
  if (t.horizon_warning) {
    log << "warning: 2 L_pop_mu^T exceeds 10% of the sampling term\n";
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "N,mean,std_error,bound\n";
  for (const BiasRow& r : t.rows) {
    csv << r.N << ',' << r.mean << ',' << r.std_error << ',' << r.bound
        << '\n';
  }
  atomic_write(path_in(c, "bias.csv"), csv.str());
  return {{"mode", "bias_scaling"},
          {"slope", t.slope},
          {"horizon_warning", t.horizon_warning}};
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e)) {
    return kExitValidation;
  }
  if (dynamic_cast<const ContractionViolation*>(&e) ||
      dynamic_cast<const InfeasibleConstant*>(&e) ||
      dynamic_cast<const Refusal*>(&e)) {
    return kExitRefusal;
  }
  return kExitNumerical;
}

Json constants_report(const ExperimentConfig& c) {
  const Setup s = make_setup(c, true);
  Json j = ledger_to_json(s.ledger);
  j["pe_certificate"] = {{"holds", s.pe.holds},
                         {"p_inf", s.pe.p_inf},
                         {"grid_min", s.pe.grid_min}};
  if (!s.has_mixing) j["mixing_error"] = s.mixing_error;
  if (s.has_mixing && s.ledger.contraction_ok) {
    j["theoretical_schedule"] = {
        {"centralized", schedule_to_json(theoretical_schedule(
                            s.ledger, c.schedule.epsilon, Regime::kCentralized))},
        {"independent", schedule_to_json(theoretical_schedule(
                            s.ledger, c.schedule.epsilon, Regime::kIndependent))},
        {"epsilon", c.schedule.epsilon}};
  }
  return j;
}

Json run_experiment(const ExperimentConfig& c, std::ostream& log) {
  const bool mixing = c.mode != Mode::kSolveExact && c.mode != Mode::kBiasScaling;
  if (c.mode == Mode::kConstants) {
    const Json report = constants_report(c);
    Json m;
    m["manifest_version"] = 1;
    m["version"] = kVersion;
    m["mode"] = mode_name(c.mode);
    m["config"] = to_json(c);
    m["ledger"] = report;
    atomic_write(path_in(c, "ledger.json"), report.dump(2) + "\n");
    atomic_write(path_in(c, "manifest.json"), m.dump(2) + "\n");
    return report;
  }
  Setup s = make_setup(c, mixing);
  Json summary;
  switch (c.mode) {
    case Mode::kSolveExact:
      summary = run_solve_exact(c, s);
      break;
    case Mode::kTrainCentralized:
    case Mode::kTrainIndependent:
      summary = run_training(c, s, log);
      break;
    case Mode::kCtdOnly:
      summary = run_ctd(c, s);
      break;
    case Mode::kBiasScaling:
      summary = run_bias(c, s, log);
      break;
    case Mode::kConstants:
      break;
  }
  write_manifest(c, s);
  atomic_write(path_in(c, "summary.json"), summary.dump(2) + "\n");
  return summary;
}

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace

int run_command(const std::string& config_path, const RunOverrides& o,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig c = load_config(config_path);
    if (o.seed) c.seeds = {*o.seed};
    if (o.out) c.out = *o.out;
    const Json summary = run_experiment(c, err);
    out << summary.dump(2) << '\n';
    return static_cast<int>(kExitOk);
  });
}

int constants_command(const std::string& config_path, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load_config(config_path);
    out << constants_report(c).dump(2) << '\n';
    return static_cast<int>(kExitOk);
  });
}

int plot_command(const std::string& csv_path, const std::string& kind,
                 const std::string& out_path, std::ostream& err) {
  return guarded(err, [&] {
    PlotKind k;
    if (kind == "convergence") {
      k = PlotKind::kConvergence;
    } else if (kind == "bias_scaling") {
      k = PlotKind::kBiasScaling;
    } else {
      throw ValidationError("--kind must be 'convergence' or 'bias_scaling'");
    }
    write_plot(csv_path, k, out_path);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace mfpma::tools
