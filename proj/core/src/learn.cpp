// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mfpma/errors.hpp"
#include "mfpma/learn.hpp"
#include "mfpma/mirror.hpp"

namespace mfpma {
namespace {

using Clock = std::chrono::steady_clock;

Vector row_entropies(const Policy& pi, const Regularizer& h) {
  Vector out(pi.num_states());
  for (int s = 0; s < pi.num_states(); ++s) {
    const Vector row = pi.row(s);
    out[s] = h.value_unchecked(row.data(), pi.num_actions());
  }
  return out;
}

// One agent's learner: its Q estimate, its policy's h values, and the
// last transition it has seen. Only its own transitions are handed to it.
struct TdLearner {
  QFunction Q;
  Vector h_pi;
  Transition pending;
  long clips = 0;

  void reset(double q0, const Policy& pi, const Regularizer& h) {
    Q.setConstant(pi.num_states(), pi.num_actions(), q0);
    h_pi = row_entropies(pi, h);
  }

  void update(const Transition& z, double beta, double gamma, double lo,
              double hi) {
    double& q = Q(z.s, z.a);
    const double delta =
        q - z.r - h_pi[z.s] - gamma * Q(z.s_next, z.a_next);
    q -= beta * delta;
    if (q < lo || q > hi) {
      q = std::clamp(q, lo, hi);
      ++clips;
    }
  }
};

struct CtdSetup {
  StepSchedule beta;
  double q0, lo, hi, gamma;
};

CtdSetup make_setup(const GameSpec& game, const Regularizer& h, int M,
                    int M_td, double t0, double modulus,
                    std::optional<double> q_init) {
  if (M < 0) throw DomainError("M must be nonnegative");
  if (M_td < 2) throw DomainError("M_td must be >= 2");
  if (!(t0 > 0.0)) throw DomainError("t0 must be positive");
  const double qmax = q_max(game, h);
  CtdSetup c;
  c.gamma = game.gamma();
  c.beta = StepSchedule{modulus > 0.0 ? modulus : 1.0 - c.gamma, t0};
  c.q0 = q_init.value_or(qmax);
  c.lo = -qmax;
  c.hi = 2.0 * qmax;
  return c;
}

// Runs one block of M_td steps and stores, for each learner, the transition
// begun two steps before the block end completed with the next action.
template <typename Policies, typename Deliver>
void run_block(Simulator& sim, const Policies& pols, int M_td,
               std::vector<Transition>& buf, Vector& mu_hat,
               std::vector<Transition>& held, Deliver&& deliver) {
  for (int j = 0; j < M_td; ++j) {
    sim.step_into(pols, buf, mu_hat);
    if (j == M_td - 2) held = buf;
  }
  for (std::size_t i = 0; i < held.size(); ++i) {
    held[i].a_next = buf[i].a;
  }
  deliver(held);
}

template <typename Policies>
CtdResult ctd_impl(Simulator& sim, const Policies& pols,
                   const Policy& tracked_pi, int tracked,
                   const CtdConfig& cfg, const Regularizer& h) {
  if (tracked < 0 || tracked >= sim.num_agents()) {
    throw DomainError("tracked agent out of range");
  }
  const CtdSetup c = make_setup(sim.game(), h, cfg.M, cfg.M_td, cfg.t0,
                                cfg.beta_modulus, cfg.q_init);
  CtdResult out;
  out.pe_violation = cfg.pe_floor > 0.0 &&
                     tracked_pi.min_probability() < cfg.pe_floor;
  TdLearner learner;
  learner.reset(c.q0, tracked_pi, h);
  std::vector<Transition> buf, held;
  Vector mu_hat;
  for (long m = 1; m <= cfg.M; ++m) {
    run_block(sim, pols, cfg.M_td, buf, mu_hat, held,
              [&](const std::vector<Transition>& z) {
                learner.update(z[tracked], c.beta(m), c.gamma, c.lo, c.hi);
              });
  }
  out.Q = learner.Q;
  out.clip_count = learner.clips;
  out.steps = static_cast<long>(cfg.M) * cfg.M_td;
  return out;
}

void fill_diagnostics(const GameSpec& game, const Regularizer& h,
                      const Policy& pi, const LearnOptions& opt,
                      EpochRecord& rec) {
  if (opt.reference) rec.dist_to_ref = policy_distance(pi, *opt.reference);
  if (opt.exploitability) rec.exploitability = exploitability(game, h, pi);
}

double q_error_at(const GameSpec& game, const Regularizer& h,
                  const Policy& pi, const QFunction& Q) {
  const Vector mu = stable_population(game, pi);
  return sup_norm(Q - value_functions(game, pi, mu, h).Q);
}

double prepare(const GameSpec& game, const Regularizer& h,
               const PmaConfig& cfg, int N) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (cfg.K < 0 || cfg.M_pg < 1) throw DomainError("need K >= 0, M_pg >= 1");
  if (cfg.M_td < 2) throw DomainError("M_td must be >= 2");
  const ConstantsLedger c =
      compute_constants(game, h, cfg.eta, std::nullopt, cfg.delta_h);
  if (cfg.strict && !c.contraction_ok) {
    throw ContractionViolation("L_Gamma_eta", c.L_Gamma_eta);
  }
  return c.delta_h;
}

Policy max_policy(const GameSpec& game, const Regularizer& h) {
  Matrix m(game.num_states(), game.num_actions());
  m.rowwise() = h.u_max(game.num_actions()).transpose();
  return Policy(m);
}

}  // namespace

CtdResult ctd_learn(Simulator& sim, const Policy& shared, int tracked_agent,
                    const CtdConfig& cfg, const Regularizer& h) {
  return ctd_impl(sim, shared, shared, tracked_agent, cfg, h);
}

CtdResult ctd_learn(Simulator& sim, const std::vector<Policy>& per_agent,
                    int tracked_agent, const CtdConfig& cfg,
                    const Regularizer& h) {
  if (static_cast<int>(per_agent.size()) != sim.num_agents()) {
    throw DimensionError("need one policy per agent");
  }
  if (tracked_agent < 0 || tracked_agent >= sim.num_agents()) {
    throw DomainError("tracked agent out of range");
  }
  return ctd_impl(sim, per_agent, per_agent[tracked_agent], tracked_agent,
                  cfg, h);
}

CentralizedResult centralized_pma(const GameSpec& game, const Regularizer& h,
                                  const PmaConfig& cfg, int N,
                                  std::uint64_t seed,
                                  const LearnOptions& options) {
  const double delta_h = prepare(game, h, cfg, N);
  const auto start = Clock::now();
  Simulator sim(game, N, cfg.init, seed);
  CentralizedResult out{max_policy(game, h), {}};
  if (options.snapshots) out.report.snapshots.push_back(out.pi);

  CtdConfig ctd;
  ctd.M = cfg.M_pg;
  ctd.M_td = cfg.M_td;
  ctd.t0 = cfg.t0;
  ctd.beta_modulus = cfg.beta_modulus;
  ctd.pe_floor = cfg.pe_floor;

  for (int k = 0; k < cfg.K; ++k) {
    const CtdResult r = ctd_learn(sim, out.pi, 0, ctd, h);
    EpochRecord rec;
    rec.epoch = k + 1;
    if (options.q_error) rec.q_error = q_error_at(game, h, out.pi, r.Q);
    out.pi = pma_step(r.Q, out.pi, cfg.eta, h, delta_h, cfg.tol_inner);
    out.report.clip_count += r.clip_count;
    out.report.pe_violation = out.report.pe_violation || r.pe_violation;
    out.report.total_steps += r.steps;
    rec.steps = out.report.total_steps;
    fill_diagnostics(game, h, out.pi, options, rec);
    rec.wall_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    out.report.epochs.push_back(rec);
    if (options.snapshots) out.report.snapshots.push_back(out.pi);
  }
  return out;
}

IndependentResult independent_pma(const GameSpec& game, const Regularizer& h,
                                  const PmaConfig& cfg, int N,
                                  std::uint64_t seed,
                                  const LearnOptions& options) {
  const double delta_h = prepare(game, h, cfg, N);
  const auto start = Clock::now();
  Simulator sim(game, N, cfg.init, seed);
  IndependentResult out{std::vector<Policy>(N, max_policy(game, h)), {}};
  if (options.snapshots) out.report.snapshots.push_back(out.pi[0]);

  const CtdSetup c = make_setup(game, h, cfg.M_pg, cfg.M_td, cfg.t0,
                                cfg.beta_modulus, std::nullopt);
  std::vector<TdLearner> learners(N);
  std::vector<Transition> buf, held;
  Vector mu_hat;

  for (int k = 0; k < cfg.K; ++k) {
    for (int i = 0; i < N; ++i) {
      learners[i].reset(c.q0, out.pi[i], h);
      learners[i].clips = 0;
      if (cfg.pe_floor > 0.0 && out.pi[i].min_probability() < cfg.pe_floor) {
        out.report.pe_violation = true;
      }
    }
    for (long m = 1; m <= cfg.M_pg; ++m) {
      const double beta = c.beta(m);
      run_block(sim, out.pi, cfg.M_td, buf, mu_hat, held,
                [&](const std::vector<Transition>& z) {
                  for (int i = 0; i < N; ++i) {
                    if (options.observe) options.observe(i, z[i]);
                    learners[i].update(z[i], beta, c.gamma, c.lo, c.hi);
                  }
                });
    }
    out.report.total_steps += static_cast<long>(cfg.M_pg) * cfg.M_td;

    EpochRecord rec;
    rec.epoch = k + 1;
    if (options.q_error) {
      rec.q_error = q_error_at(game, h, out.pi[0], learners[0].Q);
    }
    for (int i = 0; i < N; ++i) {
      out.pi[i] =
          pma_step(learners[i].Q, out.pi[i], cfg.eta, h, delta_h,
                   cfg.tol_inner);
      out.report.clip_count += learners[i].clips;
    }
    rec.steps = out.report.total_steps;
    rec.delta_pibar = mean_deviation(out.pi);
    for (int i = 1; i < N; ++i) {
      rec.max_deviation =
          std::max(rec.max_deviation, policy_distance(out.pi[i], out.pi[0]));
    }
    fill_diagnostics(game, h, out.pi[0], options, rec);
    rec.wall_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    out.report.epochs.push_back(rec);
    if (options.snapshots) out.report.snapshots.push_back(out.pi[0]);
  }
  return out;
}

double mean_deviation(const std::vector<Policy>& policies) {
  if (policies.empty()) return 0.0;
  double sum = 0.0;
  for (const Policy& p : policies) sum += policy_distance(p, policies[0]);
  return sum / static_cast<double>(policies.size());
}

void write_report_csv(std::ostream& os, const LearnReport& report,
                      std::uint64_t seed, bool header) {
  if (header) {
    os << "epoch,dist_to_exact,exploitability,delta_pibar,q_error,steps,"
          "seed\n";
  }
  auto opt = [](double v) {
    if (v < 0.0) return std::string();
    std::ostringstream f;
    f.precision(10);
    f << v;
    return f.str();
  };
  for (const EpochRecord& r : report.epochs) {
    os << r.epoch << ',' << opt(r.dist_to_ref) << ','
       << opt(r.exploitability) << ',' << opt(r.delta_pibar) << ','
       << opt(r.q_error) << ',' << r.steps << ',' << seed << '\n';
  }
}

void write_policy_text(std::ostream& os, const Policy& pi) {
  const auto old = os.precision(17);
  for (int s = 0; s < pi.num_states(); ++s) {
    for (int a = 0; a < pi.num_actions(); ++a) {
      if (a) os << ' ';
      os << pi(s, a);
    }
    os << '\n';
  }
  os.precision(old);
}

Policy read_policy_text(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw ValidationError("policy file: bad number");
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows[0].size()) {
      throw ValidationError("policy file: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("policy file: empty");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t a = 0; a < rows[s].size(); ++a) m(s, a) = rows[s][a];
  }
  return Policy(m, 1e-9);
}

}  // namespace mfpma
