// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/game.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "mfpma/errors.hpp"

namespace mfpma {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

class FunctionDynamics final : public Dynamics {
 public:
  FunctionDynamics(int num_states, TransitionFn p, RewardFn r)
      : num_states_(num_states), p_(std::move(p)), r_(std::move(r)) {}

  void transition(int s, int a, const Vector& mu, double* out) const override {
    Vector row = p_(s, a, mu);
    if (row.size() != num_states_) {
      throw DimensionError("transition row has wrong length");
    }
    normalize_probabilities(row);
    std::copy(row.data(), row.data() + num_states_, out);
  }

  double reward(int s, int a, const Vector& mu) const override {
    const double r = r_(s, a, mu);
    if (!(r >= 0.0 && r <= 1.0)) {
      std::ostringstream os;
      os << "reward " << r << " outside [0,1] at (" << s << "," << a << ")";
      throw DomainError(os.str());
    }
    return r;
  }

 private:
  int num_states_;
  TransitionFn p_;
  RewardFn r_;
};

// Ring with slip-to-other-cell noise and crowd-averse reward.
class RingDynamics final : public Dynamics {
 public:
  explicit RingDynamics(const ExampleGameParams& p) : params_(p) {
    base_.resize(p.size);
    for (int s = 0; s < p.size; ++s) base_[s] = example_base_reward(s, p.size);
  }

  void transition(int s, int a, const Vector& mu, double* out) const override {
    const int n = params_.size;
    const double p = success(mu[s]);
    const double slip = (1.0 - p) / (n - 1);
    std::fill(out, out + n, slip);
    const int target = ((s + (a - kStay)) % n + n) % n;
    out[target] = p;
  }

  double reward(int s, int, const Vector& mu) const override {
    return std::clamp(base_[s] - params_.c * mu[s], 0.0, 1.0);
  }

 private:
  double success(double crowd) const {
    return std::clamp(1.0 - params_.eps - params_.kappa * crowd, 0.0, 1.0);
  }

  ExampleGameParams params_;
  std::vector<double> base_;
};

void validate_example(const ExampleGameParams& p) {
  if (p.kind != "crowd_averse_torus" && p.kind != "congestion_slowdown") {
    throw ValidationError("unknown example game kind '" + p.kind + "'");
  }
  require(p.size >= 2, "example game size must be >= 2");
  require(p.eps >= 0.0 && p.eps <= 1.0, "eps must lie in [0,1]");
  require(p.c >= 0.0, "crowd aversion c must be >= 0");
  require(p.kappa >= 0.0, "kappa must be >= 0");
  if (p.kind == "crowd_averse_torus") {
    require(p.kappa == 0.0, "crowd_averse_torus has no kappa parameter");
  }
  require(p.gamma > 0.0 && p.gamma < 1.0, "gamma must lie in (0,1)");
}

}  // namespace

double pop_contraction_modulus(const LipschitzMetadata& m) {
  return m.K_s / 2.0 + m.K_a / 2.0 + m.K_mu;
}

GameSpec::GameSpec(int num_states, int num_actions, double gamma,
                   LipschitzMetadata meta,
                   std::shared_ptr<const Dynamics> dynamics, std::string name)
    : num_states_(num_states),
      num_actions_(num_actions),
      gamma_(gamma),
      meta_(meta),
      dynamics_(std::move(dynamics)),
      name_(std::move(name)) {
  if (num_states <= 0 || num_actions <= 0) {
    throw DimensionError("game needs at least one state and one action");
  }
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0,1)");
  require(dynamics_ != nullptr, "game dynamics must not be null");
  const double vals[] = {meta.K_mu, meta.K_s, meta.K_a,
                         meta.L_mu, meta.L_s, meta.L_a};
  for (double v : vals) {
    require(std::isfinite(v) && v >= 0.0,
            "Lipschitz metadata must be finite and nonnegative");
  }
  require(meta.K_s <= 2.0 && meta.K_a <= 2.0, "K_s and K_a must be <= 2");
  require(meta.L_s <= 1.0 && meta.L_a <= 1.0, "L_s and L_a must be <= 1");
}

Vector GameSpec::transition(int s, int a, const Vector& mu) const {
  Vector out(num_states_);
  dynamics_->transition(s, a, mu, out.data());
  return out;
}

void GameSpec::check_policy(const Policy& pi) const {
  if (pi.num_states() != num_states_ || pi.num_actions() != num_actions_) {
    throw DimensionError("policy shape does not match the game");
  }
}

void GameSpec::check_distribution(const Vector& mu) const {
  if (mu.size() != num_states_) {
    throw DimensionError("distribution length does not match the game");
  }
}

void GameSpec::check_q(const QFunction& q) const {
  if (q.rows() != num_states_ || q.cols() != num_actions_) {
    throw DimensionError("Q-function shape does not match the game");
  }
}

GameSpec make_game(int num_states, int num_actions, double gamma,
                   LipschitzMetadata meta, TransitionFn p, RewardFn r,
                   std::string name) {
  if (!p || !r) throw DomainError("transition and reward must be callable");
  auto dyn = std::make_shared<FunctionDynamics>(num_states, std::move(p),
                                                std::move(r));
  return GameSpec(num_states, num_actions, gamma, meta, std::move(dyn),
                  std::move(name));
}

double example_base_reward(int s, int size) {
  return 0.5 + 0.25 * std::cos(2.0 * std::numbers::pi * s / size);
}

LipschitzMetadata example_metadata(const ExampleGameParams& p) {
  validate_example(p);
  const int n = p.size;
  // Row for success probability q: alpha(q) e_target + beta(q) 1.
  auto alpha = [n](double q) { return (q * n - 1.0) / (n - 1); };
  const double p_hi = std::clamp(1.0 - p.eps, 0.0, 1.0);
  const double p_lo = std::clamp(1.0 - p.eps - p.kappa, 0.0, 1.0);

  LipschitzMetadata m;
  m.K_mu = 2.0 * p.kappa;
  m.K_a = 2.0 * std::max(std::abs(alpha(p_hi)), std::abs(alpha(p_lo)));
  // Different states may see different crowding, hence different q. The
  // bound |alpha|+|alpha'|+n|q-q'|/(n-1) is convex in (q,q'), so its maximum
  // over the box sits at a vertex.
  double ks = 0.0;
  for (double q1 : {p_lo, p_hi}) {
    for (double q2 : {p_lo, p_hi}) {
      ks = std::max(ks, std::abs(alpha(q1)) + std::abs(alpha(q2)) +
                            n * std::abs(q1 - q2) / (n - 1));
    }
  }
  m.K_s = std::min(2.0, ks);

  double r_min = 1.0, r_max = 0.0;
  for (int s = 0; s < n; ++s) {
    r_min = std::min(r_min, example_base_reward(s, n));
    r_max = std::max(r_max, example_base_reward(s, n));
  }
  m.L_mu = p.c;
  m.L_a = 0.0;
  m.L_s = std::min(1.0, (r_max - r_min) + p.c);
  return m;
}

GameSpec make_example_game(const ExampleGameParams& params) {
  const LipschitzMetadata meta = example_metadata(params);
  const double l_pop = pop_contraction_modulus(meta);
  if (l_pop >= 1.0) throw ContractionViolation("L_pop_mu", l_pop);
  return GameSpec(params.size, 3, params.gamma, meta,
                  std::make_shared<RingDynamics>(params), params.kind);
}

}  // namespace mfpma
