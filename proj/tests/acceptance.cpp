// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/distributions/binomial.hpp>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mfpma/exact.hpp"
#include "mfpma/learn.hpp"
#include "mfpma/mirror.hpp"
#include "mfpma/parallel.hpp"
#include "mfpma/sim.hpp"
#include "oracles.hpp"

#ifndef MFPMA_CLI_PATH
#error "MFPMA_CLI_PATH must point at the mfpma executable"
#endif

namespace fs = std::filesystem;
using namespace mfpma;
using testing::random_level_policy;
using testing::random_policy;
using testing::random_simplex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double std_error(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1) / v.size());
}

// The contractive instance every learning criterion runs on.
struct Instance {
  GameSpec game = make_example_game(ExampleGameParams{});
  Regularizer h = Regularizer::entropy(1.0);
  double eta = 100.0;
  ConstantsLedger ledger;  // with mixing at pi*
  ExactSolution exact;
  int M_td = 0;

  Instance() {
    exact = solve_exact(game, h, eta, {.tol = 1e-13});
    const ConstantsLedger base = compute_constants(game, h, eta);
    const PeCertificate pe =
        certify_pe(h, game.num_actions(), eta, base.q_max, base.delta_h);
    const MixingParams mix = estimate_mixing(
        game, exact.pi, exact.mu, 0.5 / game.num_states(), pe.p_inf);
    ledger = compute_constants(game, h, eta, mix);
    M_td = practical_mtd(mix, game.L_pop_mu());
  }

  PmaConfig pma() const {
    PmaConfig c;
    c.K = 30;
    c.M_pg = 2000;
    c.M_td = M_td;
    c.eta = eta;
    c.beta_modulus = ledger.mu_F;
    c.t0 = 2.0 / ledger.mu_F;
    return c;
  }
};

const Instance& instance() {
  static const Instance inst;
  return inst;
}

// ---------------------------------------------------------------------------

Outcome exact_linear_rate() {
  const Instance& I = instance();
  const double L = I.ledger.L_Gamma_eta;
  if (L > 0.8) return {false, fmt("L_Gamma_eta = %.4f > 0.8", L)};
  const ExactSolution sol = solve_exact(I.game, I.h, I.eta);
  double worst = -1;
  for (std::size_t t = 0; t < sol.residuals.size(); ++t) {
    worst = std::max(worst, sol.residuals[t] - (2 * std::pow(0.8, t) + 1e-8));
  }
  const double ex = exploitability(I.game, I.h, sol.pi);
  return {worst <= 0 && ex <= 1e-6 && sol.converged,
          fmt("L_Gamma_eta %.4f, %zu iterations, max excess %.3g, "
              "exploitability %.3g",
              L, sol.residuals.size(), worst, ex)};
}

Outcome value_oracle() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    const int S = dim(rng), A = dim(rng);
    const double gamma = 0.1 + 0.85 * unit(rng);
    const GameSpec g = testing::random_tabular_game(rng, S, A, gamma);
    const Regularizer h = unit(rng) < 0.5
                              ? Regularizer::entropy(0.1 + 2 * unit(rng))
                              : Regularizer::quadratic(0.1 + 2 * unit(rng));
    const Policy pi = random_policy(rng, S, A);
    const Vector mu = random_simplex(rng, S);
    const QFunction Q = value_functions(g, pi, mu, h).Q;
    const QFunction V = testing::value_iteration(g, pi, mu, h, 10000);
    worst = std::max(worst, sup_norm(Q - V));
  }
  return {worst <= 1e-8, fmt("max sup-norm gap %.3g over 50 instances", worst)};
}

struct MirrorProblem {
  Vector q, centre;
  double eta, delta_h;
  Regularizer h;
};

MirrorProblem random_mirror_problem(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Regularizer h = unit(rng) < 0.5
                            ? Regularizer::entropy(0.2 + 1.8 * unit(rng))
                            : Regularizer::quadratic(0.2 + 1.8 * unit(rng));
  Vector q(n);
  for (int i = 0; i < n; ++i) q[i] = 5 * unit(rng);
  const double eta = std::pow(10.0, -1 + 3 * unit(rng));
  const double delta_h = unit(rng) < 0.5
                             ? kNoLevelConstraint
                             : (0.05 + 0.9 * unit(rng)) * h.h_max(n);
  return {q, random_simplex(rng, n), eta, delta_h, h};
}

Outcome mirror_oracle() {
  std::mt19937_64 rng(3003);
  double worst2 = 0, worst3 = 0;
  for (int k = 0; k < 200; ++k) {
    const MirrorProblem p = random_mirror_problem(rng, 2);
    const Vector u = solve_mirror(p.q, p.centre, p.eta, p.h, p.delta_h).u;
    const Vector g =
        testing::mirror_grid_2(p.q, p.centre, p.eta, p.h, p.delta_h, 1e-6);
    worst2 = std::max(worst2, (u - g).lpNorm<1>());
  }
  for (int k = 0; k < 50; ++k) {
    const MirrorProblem p = random_mirror_problem(rng, 3);
    const Vector u = solve_mirror(p.q, p.centre, p.eta, p.h, p.delta_h).u;
    const Vector g =
        testing::mirror_grid_3(p.q, p.centre, p.eta, p.h, p.delta_h, 1e-6);
    worst3 = std::max(worst3, (u - g).lpNorm<1>());
  }
  return {worst2 <= 2e-6 && worst3 <= 2e-6,
          fmt("max l1 gap %.3g (|A|=2, 200), %.3g (|A|=3, 50)", worst2,
              worst3)};
}

// Half the pairs are independent draws, half are small perturbations.
template <typename T>
T blend(const T& a, const T& b, double t) {
  return (1 - t) * a + t * b;
}

Policy blend(const Policy& a, const Policy& b, double t) {
  return Policy((1 - t) * a.probs() + t * b.probs());
}

double pair_weight(std::mt19937_64& rng, int k) {
  if (k % 2 == 0) return 1.0;
  std::uniform_real_distribution<double> e(-4.0, -1.0);
  return std::pow(10.0, e(rng));
}

struct LipschitzCase {
  std::string name;
  GameSpec game;
  Regularizer h;
  double eta;
};

Outcome lipschitz_suite() {
  ExampleGameParams cg;
  cg.kind = "congestion_slowdown";
  cg.kappa = 0.1;
  cg.c = 0.4;
  std::vector<LipschitzCase> cases = {
      {"torus/entropy", make_example_game(ExampleGameParams{}),
       Regularizer::entropy(1.0), 100.0},
      {"congestion/quadratic", make_example_game(cg),
       Regularizer::quadratic(1.0), 10.0},
  };
  std::ostringstream detail;
  bool pass = true;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const LipschitzCase& c : cases) {
    const GameSpec& g = c.game;
    const int S = g.num_states(), A = g.num_actions();
    const ConstantsLedger L = compute_constants(g, c.h, c.eta);
    const double qm = L.q_max;
    const double Ka = g.meta().K_a;
    // worst (lhs - rhs) and worst lhs / rhs per operator
    double excess[5] = {-1e300, -1e300, -1e300, -1e300, -1e300};
    double ratio[5] = {0, 0, 0, 0, 0};
    auto record = [&](int i, double lhs, double rhs) {
      excess[i] = std::max(excess[i], lhs - rhs);
      if (rhs > 1e-12) ratio[i] = std::max(ratio[i], lhs / rhs);
    };
    for (int k = 0; k < 1000; ++k) {
      const double t = pair_weight(rng, k);
      const Vector mu = random_simplex(rng, S);
      const Vector mu2 = blend<Vector>(mu, random_simplex(rng, S), t);
      const Policy pi = random_policy(rng, S, A);
      const Policy pi2 = blend(pi, random_policy(rng, S, A), t);
      const double dmu = (mu - mu2).lpNorm<1>(), dpi = policy_distance(pi, pi2);
      record(0,
             l1_distance(pop_update(g, mu, pi), pop_update(g, mu2, pi2)),
             L.L_pop_mu * dmu + Ka / 2 * dpi);
      record(1,
             l1_distance(stable_population(g, pi, 1e-14),
                         stable_population(g, pi2, 1e-14)),
             L.L_pop_inf * dpi);

      const Policy lp = random_level_policy(rng, c.h, L.delta_h, S, A);
      const Policy lp2 =
          blend(lp, random_level_policy(rng, c.h, L.delta_h, S, A), t);
      const double dl = policy_distance(lp, lp2);
      record(2,
             sup_norm(gamma_q(g, lp, mu, c.h) - gamma_q(g, lp2, mu2, c.h)),
             L.L_qpi * dl + L.L_qmu * dmu);

      QFunction q(S, A), q2(S, A);
      for (int i = 0; i < S * A; ++i) q(i % S, i / S) = qm * unit(rng);
      for (int i = 0; i < S * A; ++i) q2(i % S, i / S) = qm * unit(rng);
      q2 = blend<QFunction>(q, q2, t);
      record(3,
             policy_distance(pma_step(q, pi, c.eta, c.h, L.delta_h, 1e-14),
                             pma_step(q2, pi2, c.eta, c.h, L.delta_h, 1e-14)),
             L.L_md_pi * dpi + L.L_md_q * sup_norm(q - q2));

      record(4,
             policy_distance(gamma_eta(g, c.h, c.eta, L.delta_h, lp, 1e-14),
                             gamma_eta(g, c.h, c.eta, L.delta_h, lp2, 1e-14)),
             L.L_Gamma_eta * dl);
    }
    const char* names[5] = {"pop", "pop_inf", "q", "md", "eta"};
    detail << c.name << ":";
    for (int i = 0; i < 5; ++i) {
      const bool ok = excess[i] <= 1e-9;
      pass = pass && ok;
      detail << fmt(" %s %.3f%s", names[i], ratio[i], ok ? "" : "(!)");
    }
    detail << "; ";
  }
  detail << "max sampled ratio to bound";
  return {pass, detail.str()};
}

Outcome bias_scaling() {
  const Instance& I = instance();
  std::vector<std::uint64_t> seeds(50);
  for (int k = 0; k < 50; ++k) seeds[k] = k + 1;
  const int T = 200;
  const BiasTable t = population_bias_experiment(
      I.game, I.exact.pi, {16, 64, 256, 1024}, T, seeds);
  const double tail = 2 * std::pow(I.game.L_pop_mu(), T);
  bool below = true;
  std::ostringstream d;
  for (const BiasRow& r : t.rows) {
    below = below && r.mean + 3 * r.std_error <= r.bound + tail;
    d << fmt("N=%d %.4f+-%.4f (bound %.3f); ", r.N, r.mean, r.std_error,
             r.bound);
  }
  d << fmt("slope %.3f", t.slope);
  return {below && t.slope >= -0.65 && t.slope <= -0.35, d.str()};
}

// Reward averaged over the law of mu_hat when the other N - 1 agents are
// i.i.d. from mu: the expectation a finite population actually learns.
GameSpec finite_population_game(const GameSpec& g, const Vector& mu, int N,
                                Matrix& RN) {
  const int S = g.num_states(), A = g.num_actions();
  RN.resize(S, A);
  for (int s = 0; s < S; ++s) {
    boost::math::binomial_distribution<double> others(N - 1, mu[s]);
    for (int a = 0; a < A; ++a) {
      double acc = 0;
      for (int k = 0; k < N; ++k) {
        const double own = (k + 1.0) / N;
        Vector m = mu * ((1 - own) / (1 - mu[s]));
        m[s] = own;
        acc += boost::math::pdf(others, k) * g.reward(s, a, m);
      }
      RN(s, a) = acc;
    }
  }
  return make_game(
      S, A, g.gamma(), g.meta(),
      [&g](int s, int a, const Vector& m) { return g.transition(s, a, m); },
      [&RN](int s, int a, const Vector&) { return RN(s, a); });
}

Outcome ctd_convergence() {
  const Instance& I = instance();
  const int N = 500, seeds = 24;
  const Policy& pi = I.exact.pi;
  const Vector mu = stable_population(I.game, pi, 1e-14);
  Matrix RN;
  const GameSpec gN = finite_population_game(I.game, mu, N, RN);
  const QFunction Qs = value_functions(I.game, pi, mu, I.h).Q;
  const QFunction QN = value_functions(gN, pi, mu, I.h).Q;
  const double floor = sup_norm(Qs - QN);

  auto run = [&](int M, std::vector<double>& err, std::vector<double>& errN) {
    err.assign(seeds, 0);
    errN.assign(seeds, 0);
    parallel_for(seeds, [&](std::size_t k) {
      Simulator sim(I.game, N, InitSpec::uniform_random(), 1000 + k);
      CtdConfig c;
      c.M = M;
      c.M_td = I.M_td;
      c.beta_modulus = I.ledger.mu_F;
      c.t0 = 2.0 / I.ledger.mu_F;
      const CtdResult r = ctd_learn(sim, pi, 0, c, I.h);
      err[k] = sup_norm(r.Q - Qs);
      errN[k] = sup_norm(r.Q - QN);
    });
  };
  std::vector<double> e1, n1, e2, n2;
  run(20000, e1, n1);
  run(40000, e2, n2);
  const std::vector<double> first10(e1.begin(), e1.begin() + 10);
  const double err10 = mean(first10);
  const double ratio = mean(n1) / mean(n2);
  const double qmax = I.ledger.q_max;
  return {err10 <= 0.1 * qmax && ratio >= 1.2 && ratio <= 2.0,
          fmt("M_td %d; mean error at M=2e4 over 10 seeds %.4f (%.4f Q_max); "
              "error against finite-N target %.5f -> %.5f at M=4e4 "
              "(ratio %.3f, %d seeds, N-bias %.5f)",
              I.M_td, err10, err10 / qmax, mean(n1), mean(n2), ratio, seeds,
              floor)};
}

// Exploitability bound implied by ||pi - pi*||_1 = d: both value gaps are
// controlled through V's Lipschitz constants and the stable population map.
double exploitability_bound(const ConstantsLedger& L, double d) {
  return (2 * L.L_Vmu * L.L_pop_inf + L.L_Vpi) * d;
}

Outcome centralized_learning() {
  const Instance& I = instance();
  const PmaConfig cfg = I.pma();
  const int seeds = 20;
  std::vector<double> dist(seeds), expl(seeds);
  parallel_for(seeds, [&](std::size_t k) {
    const CentralizedResult r =
        centralized_pma(I.game, I.h, cfg, 500, k + 1);
    dist[k] = policy_distance(r.pi, I.exact.pi);
    expl[k] = exploitability(I.game, I.h, r.pi);
  });
  bool expl_ok = true;
  double worst = 0;
  for (int k = 0; k < seeds; ++k) {
    const double b = 2 * exploitability_bound(I.ledger, dist[k]);
    expl_ok = expl_ok && expl[k] <= b;
    worst = std::max(worst, expl[k] / b);
  }
  const Matrix start = Policy::uniform(5, 3).probs();
  const double d0 = policy_distance(Policy(start), I.exact.pi);
  return {mean(dist) <= 0.15 && expl_ok,
          fmt("mean ||pi_K - pi*|| %.4f (start %.4f), mean exploitability "
              "%.3g, worst exploitability / (2 x bound) %.3f",
              mean(dist), d0, mean(expl), worst)};
}

Outcome independent_learning() {
  const Instance& I = instance();
  const PmaConfig cfg = I.pma();
  const int seeds = 20, N = 500;
  std::vector<std::vector<double>> dist(seeds, std::vector<double>(N));
  std::vector<double> agree(seeds);
  parallel_for(seeds, [&](std::size_t k) {
    const IndependentResult r = independent_pma(I.game, I.h, cfg, N, k + 1);
    double mx = 0;
    for (int i = 0; i < N; ++i) {
      dist[k][i] = policy_distance(r.pi[i], I.exact.pi);
      mx = std::max(mx, policy_distance(r.pi[i], r.pi[0]));
    }
    agree[k] = mx;
  });
  double worst_agent = 0;
  for (int i = 0; i < N; ++i) {
    double m = 0;
    for (int k = 0; k < seeds; ++k) m += dist[k][i] / seeds;
    worst_agent = std::max(worst_agent, m);
  }
  double worst_agree = 0;
  for (double a : agree) worst_agree = std::max(worst_agree, a);
  return {worst_agent <= 0.2 && worst_agree <= 0.1,
          fmt("worst per-agent mean distance %.4f, worst agreement %.4f",
              worst_agent, worst_agree)};
}

Outcome strong_monotonicity() {
  const Instance& I = instance();
  const Policy& pi = I.exact.pi;
  const Vector mu = stable_population(I.game, pi, 1e-14);
  const QFunction Qs = value_functions(I.game, pi, mu, I.h).Q;
  const double muF = I.ledger.mu_F;
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> box(0.0, I.ledger.q_max);
  double worst = 1e300;
  for (int k = 0; k < 1000; ++k) {
    QFunction Q(5, 3);
    for (int i = 0; i < 15; ++i) Q(i % 5, i / 5) = box(rng);
    if (k % 2) Q = Qs + pair_weight(rng, 1) * (Q - Qs);
    const QFunction F = expected_td_operator(I.game, Q, pi, mu, I.h);
    const QFunction D = Q - Qs;
    const double lhs = (F.array() * D.array()).sum();
    worst = std::min(worst, lhs - muF * D.squaredNorm());
  }
  return {worst >= -1e-9,
          fmt("mu_F %.4g, min <F(Q), Q - Q*> - mu_F ||Q - Q*||^2 = %.3g",
              muF, worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("mfpma_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string game =
      R"("game":{"kind":"crowd_averse_torus","size":5,"params":{"eps":0.7,"c":0.5},"gamma":0.5},)"
      R"("h":{"kind":"entropy","tau":1.0},"eta":100)";
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"exact", R"({"mode":"solve_exact",)" + game + "}"},
      {"bias", R"({"mode":"bias_scaling",)" + game +
                   R"(,"seeds":[1,2,3,4],"Ns":[16,64],"T":50})"},
      {"ctd", R"({"mode":"ctd_only",)" + game +
                  R"(,"N":50,"seeds":[1,2,3],"schedule":{"M":300}})"},
      {"central", R"({"mode":"train_centralized",)" + game +
                      R"(,"N":40,"seeds":[1,2,3],"schedule":{"K":3,"M_pg":150}})"},
      {"indep", R"({"mode":"train_independent",)" + game +
                    R"(,"N":40,"seeds":[1,2,3],"schedule":{"K":3,"M_pg":150}})"},
  };
  const std::string cli = "'" MFPMA_CLI_PATH "'";
  int files = 0;
  std::vector<std::string> bad;
  for (const auto& [name, text] : configs) {
    const fs::path a = dir / (name + "_a"), b = dir / (name + "_b");
    std::ofstream(dir / (name + ".json")) << text;
    const int ra = shell("MFPMA_THREADS=1 " + cli + " run --config '" +
                         (dir / (name + ".json")).string() + "' --out '" +
                         a.string() + "' >/dev/null 2>&1");
    const int rb = shell("MFPMA_THREADS=3 " + cli + " run --config '" +
                         (a / "manifest.json").string() + "' --out '" +
                         b.string() + "' >/dev/null 2>&1");
    if (ra != 0 || rb != 0) {
      bad.push_back(name + " (exit " + std::to_string(ra) + "/" +
                    std::to_string(rb) + ")");
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string ext = entry.path().extension().string();
      if (ext != ".csv" && ext != ".txt") continue;
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        bad.push_back(name + "/" + entry.path().filename().string());
      }
    }
  }
  fs::remove_all(dir);
  std::string d = fmt("%d output files compared across 5 modes", files);
  for (const std::string& b : bad) d += "; mismatch " + b;
  return {bad.empty() && files >= 10, d};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> all = {
      {"exact linear convergence", exact_linear_rate},
      {"value-function oracle", value_oracle},
      {"mirror-step oracle", mirror_oracle},
      {"Lipschitz bounds", lipschitz_suite},
      {"population bias scaling", bias_scaling},
      {"CTD convergence", ctd_convergence},
      {"centralized learning", centralized_learning},
      {"independent learning", independent_learning},
      {"strong monotonicity", strong_monotonicity},
      {"determinism", determinism},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  // Shared setup (exact solve, PE certificate, mixing) stays out of timings.
  const auto t_setup = std::chrono::steady_clock::now();
  instance();
  std::printf("setup: L_Gamma_eta %.4f, M_td %d, mu_F %.4g [%.1f s]\n",
              instance().ledger.L_Gamma_eta, instance().M_td,
              instance().ledger.mu_F,
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t_setup)
                  .count());
  int failures = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("criterion %2d %s: %s [%.1f s] %s\n", id,
                o.pass ? "PASS" : "FAIL", all[i].first, secs,
                o.detail.c_str());
    if (!o.pass) ++failures;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
