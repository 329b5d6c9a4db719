// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/sim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "mfpma/errors.hpp"
#include "mfpma/exact.hpp"
#include "mfpma/parallel.hpp"

namespace mfpma {
namespace {

constexpr std::uint32_t kActionStream = 0;
constexpr std::uint32_t kInitStream = 1;

int sample_action(const Policy& pi, int s, double u) {
  const Matrix& p = pi.probs();
  return sample_index(p.data() + s, static_cast<int>(p.cols()), u,
                      p.outerStride());
}

}  // namespace

Simulator::Simulator(const GameSpec& game, int num_agents,
                     const InitSpec& init, std::uint64_t seed)
    : game_(&game), rng_(seed), seed_(seed) {
  if (num_agents < 1) throw DomainError("number of agents must be >= 1");
  const int S = game.num_states();
  const int A = game.num_actions();
  states_.resize(num_agents);
  switch (init.mode) {
    case InitMode::kUniformRandom:
      for (int i = 0; i < num_agents; ++i) {
        const double u = rng_.draw(i, 0, kInitStream).first;
        states_[i] = std::min(S - 1, static_cast<int>(u * S));
      }
      break;
    case InitMode::kAllAt:
      if (init.state < 0 || init.state >= S) {
        throw DomainError("initial state out of range");
      }
      std::fill(states_.begin(), states_.end(), init.state);
      break;
    case InitMode::kCustom:
      if (static_cast<int>(init.states.size()) != num_agents) {
        throw DimensionError("custom initial states must have length N");
      }
      for (int s : init.states) {
        if (s < 0 || s >= S) throw DomainError("initial state out of range");
      }
      states_ = init.states;
      break;
  }
  counts_.assign(S, 0);
  for (int s : states_) ++counts_[s];
  rows_.assign(static_cast<std::size_t>(S) * A * S, 0.0);
  rewards_.assign(static_cast<std::size_t>(S) * A, 0.0);
  stamp_.assign(static_cast<std::size_t>(S) * A, ~std::uint64_t{0});
}

Vector Simulator::empirical_mu() const {
  Vector mu(game_->num_states());
  const double inv = 1.0 / num_agents();
  for (int s = 0; s < mu.size(); ++s) mu[s] = counts_[s] * inv;
  return mu;
}

void Simulator::check_policies(const Policy* shared,
                               const std::vector<Policy>* per_agent) const {
  if (shared) {
    game_->check_policy(*shared);
    return;
  }
  if (static_cast<int>(per_agent->size()) != num_agents()) {
    throw DimensionError("need one policy per agent");
  }
  for (const Policy& p : *per_agent) game_->check_policy(p);
}

void Simulator::advance(const Policy* shared,
                        const std::vector<Policy>* per_agent,
                        std::vector<Transition>& out, Vector& mu_hat) {
  const int S = game_->num_states();
  const int A = game_->num_actions();
  const int N = num_agents();
  mu_hat = empirical_mu();
  out.resize(N);

  // Every agent acts against the same mu_hat; states are written afterwards.
  for (int i = 0; i < N; ++i) {
    const Policy& pi = shared ? *shared : (*per_agent)[i];
    const UniformPair u = rng_.draw(i, t_, kActionStream);
    const int s = states_[i];
    const int a = sample_action(pi, s, u.first);
    const std::size_t k = static_cast<std::size_t>(s) * A + a;
    double* row = rows_.data() + k * S;
    if (stamp_[k] != t_) {
      game_->transition_into(s, a, mu_hat, row);
      rewards_[k] = game_->reward(s, a, mu_hat);
      stamp_[k] = t_;
    }
    Transition& z = out[i];
    z.s = s;
    z.a = a;
    z.r = rewards_[k];
    z.s_next = sample_index(row, S, u.second);
    z.a_next = -1;
  }
  for (int i = 0; i < N; ++i) {
    --counts_[states_[i]];
    states_[i] = out[i].s_next;
    ++counts_[states_[i]];
  }
  ++t_;
}

void Simulator::step_into(const Policy& shared, std::vector<Transition>& out,
                          Vector& mu_hat) {
  check_policies(&shared, nullptr);
  advance(&shared, nullptr, out, mu_hat);
}

void Simulator::step_into(const std::vector<Policy>& per_agent,
                          std::vector<Transition>& out, Vector& mu_hat) {
  check_policies(nullptr, &per_agent);
  advance(nullptr, &per_agent, out, mu_hat);
}

StepResult Simulator::step(const Policy& shared) {
  StepResult r;
  step_into(shared, r.transitions, r.mu_hat);
  return r;
}

StepResult Simulator::step(const std::vector<Policy>& per_agent) {
  StepResult r;
  step_into(per_agent, r.transitions, r.mu_hat);
  return r;
}

int Simulator::next_action(int agent, const Policy& pi) const {
  if (agent < 0 || agent >= num_agents()) {
    throw DomainError("agent index out of range");
  }
  game_->check_policy(pi);
  return sample_action(pi, states_[agent],
                       rng_.draw(agent, t_, kActionStream).first);
}

std::vector<int> Simulator::next_actions(const Policy& shared) const {
  check_policies(&shared, nullptr);
  std::vector<int> a(num_agents());
  for (int i = 0; i < num_agents(); ++i) {
    a[i] = sample_action(shared, states_[i],
                         rng_.draw(i, t_, kActionStream).first);
  }
  return a;
}

std::vector<int> Simulator::next_actions(
    const std::vector<Policy>& per_agent) const {
  check_policies(nullptr, &per_agent);
  std::vector<int> a(num_agents());
  for (int i = 0; i < num_agents(); ++i) {
    a[i] = sample_action(per_agent[i], states_[i],
                         rng_.draw(i, t_, kActionStream).first);
  }
  return a;
}

namespace {

template <typename Policies>
FixedPolicyRun run_impl(Simulator& sim, const Policies& policies, int T) {
  if (T < 0) throw DomainError("T must be nonnegative");
  FixedPolicyRun run;
  run.transitions.resize(T);
  run.mu_path.resize(T);
  for (int t = 0; t < T; ++t) {
    sim.step_into(policies, run.transitions[t], run.mu_path[t]);
    if (t > 0) {
      auto& prev = run.transitions[t - 1];
      for (std::size_t i = 0; i < prev.size(); ++i) {
        prev[i].a_next = run.transitions[t][i].a;
      }
    }
  }
  if (T > 0) {
    const std::vector<int> a = sim.next_actions(policies);
    auto& last = run.transitions[T - 1];
    for (std::size_t i = 0; i < last.size(); ++i) last[i].a_next = a[i];
  }
  return run;
}

}  // namespace

FixedPolicyRun run_fixed_policy(Simulator& sim, const Policy& shared, int T) {
  return run_impl(sim, shared, T);
}

FixedPolicyRun run_fixed_policy(Simulator& sim,
                                const std::vector<Policy>& per_agent, int T) {
  return run_impl(sim, per_agent, T);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("slope fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("slope fit needs distinct x values");
  return sxy / sxx;
}

BiasTable population_bias_experiment(const GameSpec& game, const Policy& pi,
                                     const std::vector<int>& Ns, int T,
                                     const std::vector<std::uint64_t>& seeds) {
  if (Ns.empty() || seeds.empty()) {
    throw DomainError("need at least one N and one seed");
  }
  if (T < 0) throw DomainError("T must be nonnegative");
  const double L = game.L_pop_mu();
  const Vector mu_star = stable_population(game, pi, 1e-12);
  const int S = game.num_states();

  BiasTable table;
  const std::size_t n_seeds = seeds.size();
  std::vector<double> errs(Ns.size() * n_seeds);
  parallel_for(errs.size(), [&](std::size_t k) {
    const int N = Ns[k / n_seeds];
    Simulator sim(game, N, InitSpec::uniform_random(), seeds[k % n_seeds]);
    std::vector<Transition> buf;
    Vector mu_hat;
    for (int t = 0; t < T; ++t) sim.step_into(pi, buf, mu_hat);
    errs[k] = l1_distance(sim.empirical_mu(), mu_star);
  });

  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < Ns.size(); ++j) {
    BiasRow row;
    row.N = Ns[j];
    double sum = 0, sq = 0;
    for (std::size_t k = 0; k < n_seeds; ++k) {
      const double e = errs[j * n_seeds + k];
      sum += e;
      sq += e * e;
    }
    row.mean = sum / n_seeds;
    if (n_seeds > 1) {
      const double var = std::max(0.0, (sq - n_seeds * row.mean * row.mean) /
                                           (n_seeds - 1.0));
      row.std_error = std::sqrt(var / n_seeds);
    }
    row.bound = std::sqrt(2.0 * S / row.N) / (1.0 - L);
    table.rows.push_back(row);
    if (row.mean > 0.0) {
      lx.push_back(std::log(static_cast<double>(row.N)));
      ly.push_back(std::log(row.mean));
    }
    if (2.0 * std::pow(L, T) > 0.1 * row.bound) table.horizon_warning = true;
  }
  if (lx.size() >= 2) table.slope = fit_slope(lx, ly);
  return table;
}

void write_trajectory_csv(std::ostream& os, const FixedPolicyRun& run) {
  os << "t,agent,s,a,r,s_next\n";
  for (std::size_t t = 0; t < run.transitions.size(); ++t) {
    const auto& step = run.transitions[t];
    for (std::size_t i = 0; i < step.size(); ++i) {
      const Transition& z = step[i];
      os << t << ',' << i << ',' << z.s << ',' << z.a << ',' << z.r << ','
         << z.s_next << '\n';
    }
  }
}

void write_mu_path_csv(std::ostream& os, const std::vector<Vector>& mu_path) {
  os << 't';
  const int S = mu_path.empty() ? 0 : static_cast<int>(mu_path[0].size());
  for (int s = 0; s < S; ++s) os << ",mu_" << s;
  os << '\n';
  for (std::size_t t = 0; t < mu_path.size(); ++t) {
    os << t;
    for (int s = 0; s < S; ++s) os << ',' << mu_path[t][s];
    os << '\n';
  }
}

}  // namespace mfpma
