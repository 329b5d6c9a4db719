// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "mfpma/types.hpp"

namespace mfpma {

// Declared Lipschitz moduli of P and R under the discrete metric on states
// and actions and the l1 norm on population distributions.
struct LipschitzMetadata {
  double K_mu = 0.0;
  double K_s = 2.0;
  double K_a = 2.0;
  double L_mu = 0.0;
  double L_s = 1.0;
  double L_a = 1.0;
};

// K_s/2 + K_a/2 + K_mu
double pop_contraction_modulus(const LipschitzMetadata& meta);

// Population-dependent transition kernel and reward.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  // Writes P(. | s, a, mu) into out[0 .. |S|).
  virtual void transition(int s, int a, const Vector& mu, double* out) const = 0;
  virtual double reward(int s, int a, const Vector& mu) const = 0;
};

// Finite symmetric anonymous game. Immutable after construction.
class GameSpec {
 public:
  GameSpec(int num_states, int num_actions, double gamma,
           LipschitzMetadata meta, std::shared_ptr<const Dynamics> dynamics,
           std::string name = "custom");

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double gamma() const { return gamma_; }
  const LipschitzMetadata& meta() const { return meta_; }
  const std::string& name() const { return name_; }

  double L_pop_mu() const { return pop_contraction_modulus(meta_); }

  Vector transition(int s, int a, const Vector& mu) const;
  void transition_into(int s, int a, const Vector& mu, double* out) const {
    dynamics_->transition(s, a, mu, out);
  }
  double reward(int s, int a, const Vector& mu) const {
    return dynamics_->reward(s, a, mu);
  }

  void check_policy(const Policy& pi) const;
  void check_distribution(const Vector& mu) const;
  void check_q(const QFunction& q) const;

 private:
  int num_states_;
  int num_actions_;
  double gamma_;
  LipschitzMetadata meta_;
  std::shared_ptr<const Dynamics> dynamics_;
  std::string name_;
};

using TransitionFn = std::function<Vector(int s, int a, const Vector& mu)>;
using RewardFn = std::function<double(int s, int a, const Vector& mu)>;

// Direct in-code construction. Every transition row returned by `p` is
// checked (and renormalized within kProbTolerance) and every reward must lie
// in [0,1]; violations throw DomainError at evaluation time.
GameSpec make_game(int num_states, int num_actions, double gamma,
                   LipschitzMetadata meta, TransitionFn p, RewardFn r,
                   std::string name = "custom");

// Parametric example families. States form a ring; actions are
// {left, stay, right}. The intended move succeeds with probability
// p = clamp(1 - eps - kappa * mu(s), 0, 1); otherwise the agent slips to a
// uniformly random other cell. Reward is clamp(r0(s) - c * mu(s), 0, 1)
// with r0(s) = 1/2 + cos(2 pi s / size) / 4.
//   crowd_averse_torus:   kappa = 0
//   congestion_slowdown:  kappa >= 0
struct ExampleGameParams {
  std::string kind = "crowd_averse_torus";
  int size = 5;
  double eps = 0.7;
  double c = 0.5;
  double kappa = 0.0;
  double gamma = 0.5;
};

inline constexpr int kLeft = 0;
inline constexpr int kStay = 1;
inline constexpr int kRight = 2;

double example_base_reward(int s, int size);

// Metadata of an example family without the stability check.
LipschitzMetadata example_metadata(const ExampleGameParams& params);

// Throws DomainError for parameters outside their ranges and
// ContractionViolation("L_pop_mu", ...) when K_s/2 + K_a/2 + K_mu >= 1.
GameSpec make_example_game(const ExampleGameParams& params);

}  // namespace mfpma
