// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "mfpma/errors.hpp"
#include "mfpma/game.hpp"
#include "oracles.hpp"

namespace mfpma {
namespace {

using testing::random_policy;
using testing::random_simplex;

TEST(PolicyDistance, IdenticalPoliciesAreAtZero) {
  std::mt19937_64 rng(1);
  const Policy p = random_policy(rng, 4, 3);
  EXPECT_EQ(policy_distance(p, p), 0.0);
}

TEST(PolicyDistance, DisjointRowGivesTwo) {
  Matrix a = Matrix::Zero(3, 2), b = Matrix::Zero(3, 2);
  a.col(0).setOnes();
  b.col(0).setOnes();
  b(1, 0) = 0.0;
  b(1, 1) = 1.0;
  EXPECT_EQ(policy_distance(Policy(a), Policy(b)), 2.0);
}

TEST(PolicyDistance, MatchesRowwiseBruteForce) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const Policy p = random_policy(rng, 3, 3), q = random_policy(rng, 3, 3);
    double expect = 0.0;
    for (int s = 0; s < 3; ++s) {
      double row = 0.0;
      for (int a = 0; a < 3; ++a) row += std::abs(p(s, a) - q(s, a));
      expect = std::max(expect, row);
    }
    EXPECT_NEAR(policy_distance(p, q), expect, 1e-15);
    EXPECT_NEAR(policy_distance(q, p), expect, 1e-15);
  }
}

TEST(PolicyDistance, TriangleInequalityAndRange) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Policy a = random_policy(rng, 4, 3), b = random_policy(rng, 4, 3),
                 c = random_policy(rng, 4, 3);
    const double ab = policy_distance(a, b);
    EXPECT_LE(ab, policy_distance(a, c) + policy_distance(c, b) + 1e-15);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 2.0);
  }
}

TEST(PolicyDistance, ShapeMismatchThrows) {
  EXPECT_THROW(policy_distance(Policy::uniform(2, 3), Policy::uniform(3, 3)),
               DimensionError);
}

TEST(PolicyType, RejectsRowsOffTheSimplex) {
  Matrix m(1, 2);
  m << 0.7, 0.4;
  EXPECT_THROW(Policy{m}, DomainError);
  m << 1.2, -0.2;
  EXPECT_THROW(Policy{m}, DomainError);
  m << 0.5, 0.5 + 1e-13;
  const Policy p(m);
  EXPECT_NEAR(p.probs().sum(), 1.0, 1e-15);
}

TEST(ExampleGame, SpecInstanceMetadata) {
  ExampleGameParams p;
  p.eps = 0.1;
  p.c = 0.5;
  const LipschitzMetadata m = example_metadata(p);
  EXPECT_EQ(m.K_mu, 0.0);
  EXPECT_EQ(m.L_mu, 0.5);
  // A reliable mover is not population-stable in this family.
  EXPECT_THROW(make_example_game(p), ContractionViolation);
  try {
    make_example_game(p);
  } catch (const ContractionViolation& e) {
    EXPECT_EQ(e.constant(), "L_pop_mu");
  }
}

TEST(ExampleGame, TwoCellHalfSlipIsFullyMixing) {
  ExampleGameParams p;
  p.size = 2;
  p.eps = 0.5;
  const GameSpec g = make_example_game(p);
  EXPECT_EQ(g.meta().K_s, 0.0);
  EXPECT_EQ(g.meta().K_a, 0.0);
  const Vector mu = uniform_distribution(2);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 3; ++a) {
      const Vector row = g.transition(s, a, mu);
      EXPECT_NEAR(row[0], 0.5, 1e-15);
      EXPECT_NEAR(row[1], 0.5, 1e-15);
    }
}

TEST(ExampleGame, CongestionWithZeroSlowdownMatchesTorus) {
  ExampleGameParams torus, cong;
  cong.kind = "congestion_slowdown";
  cong.kappa = 0.0;
  const GameSpec a = make_example_game(torus), b = make_example_game(cong);
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector mu = random_simplex(rng, 5);
    for (int s = 0; s < 5; ++s)
      for (int act = 0; act < 3; ++act) {
        EXPECT_EQ(a.transition(s, act, mu), b.transition(s, act, mu));
        EXPECT_EQ(a.reward(s, act, mu), b.reward(s, act, mu));
      }
  }
}

TEST(ExampleGame, RejectsBadParameters) {
  ExampleGameParams p;
  p.size = 1;
  EXPECT_THROW(make_example_game(p), DomainError);
  p = {};
  p.gamma = 1.0;
  EXPECT_THROW(make_example_game(p), DomainError);
  p = {};
  p.kind = "maze";
  EXPECT_THROW(make_example_game(p), ValidationError);
}

TEST(ExampleGame, RewardsInUnitIntervalAndRowsNormalized) {
  std::mt19937_64 rng(5);
  for (const char* kind : {"crowd_averse_torus", "congestion_slowdown"}) {
    ExampleGameParams p;
    p.kind = kind;
    p.kappa = p.kind == "congestion_slowdown" ? 0.05 : 0.0;
    p.c = 0.9;
    const GameSpec g = make_example_game(p);
    for (int rep = 0; rep < 200; ++rep) {
      const Vector mu = random_simplex(rng, 5);
      for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 3; ++a) {
          const double r = g.reward(s, a, mu);
          EXPECT_GE(r, 0.0);
          EXPECT_LE(r, 1.0);
          const Vector row = g.transition(s, a, mu);
          EXPECT_NEAR(row.sum(), 1.0, 1e-12);
          EXPECT_GE(row.minCoeff(), 0.0);
        }
    }
  }
}

// Sampled Lipschitz ratios against the declared metadata, with mu drawn
// both from a simplex grid and as small perturbations.
void check_metadata(const ExampleGameParams& p) {
  const GameSpec g = make_example_game(p);
  const LipschitzMetadata& m = g.meta();
  EXPECT_LT(g.L_pop_mu(), 1.0);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> ds(0, p.size - 1), da(0, 2);
  std::vector<Vector> grid;
  const int res = 4;
  // Grid over the first three coordinates, remaining mass spread uniformly.
  for (int i = 0; i <= res; ++i)
    for (int j = 0; i + j <= res; ++j) {
      Vector mu = Vector::Zero(p.size);
      mu[0] = double(i) / res;
      mu[1] = double(j) / res;
      const double rest = 1.0 - mu[0] - mu[1];
      for (int s = 2; s < p.size; ++s) mu[s] = rest / (p.size - 2);
      grid.push_back(mu);
    }
  double worst_p = 0.0, worst_r = 0.0;
  for (int rep = 0; rep < 20000; ++rep) {
    Vector mu, nu;
    if (rep % 2 == 0) {
      mu = grid[rng() % grid.size()];
      nu = grid[rng() % grid.size()];
    } else {
      mu = random_simplex(rng, p.size);
      nu = mu + 1e-3 * (random_simplex(rng, p.size) - mu);
    }
    const int s = ds(rng), a = da(rng);
    const int s2 = rep % 3 == 0 ? s : ds(rng), a2 = rep % 5 == 0 ? a : da(rng);
    const double dmu = (mu - nu).lpNorm<1>();
    const double den_p = m.K_mu * dmu + m.K_s * (s != s2) + m.K_a * (a != a2);
    const double den_r = m.L_mu * dmu + m.L_s * (s != s2) + m.L_a * (a != a2);
    const double num_p = (g.transition(s, a, mu) - g.transition(s2, a2, nu)).lpNorm<1>();
    const double num_r = std::abs(g.reward(s, a, mu) - g.reward(s2, a2, nu));
    if (den_p > 0) worst_p = std::max(worst_p, num_p / den_p);
    else EXPECT_LE(num_p, 1e-12);
    if (den_r > 0) worst_r = std::max(worst_r, num_r / den_r);
    else EXPECT_LE(num_r, 1e-12);
  }
  EXPECT_LE(worst_p, 1.0 + 1e-9) << p.kind;
  EXPECT_LE(worst_r, 1.0 + 1e-9) << p.kind;
}

TEST(ExampleGame, DeclaredMetadataIsSoundTorus) {
  ExampleGameParams p;
  check_metadata(p);
  p.eps = 0.8;
  p.c = 1.0;
  p.size = 4;
  check_metadata(p);
}

TEST(ExampleGame, DeclaredMetadataIsSoundCongestion) {
  ExampleGameParams p;
  p.kind = "congestion_slowdown";
  p.eps = 0.65;
  p.kappa = 0.1;
  check_metadata(p);
}

TEST(MakeGame, ValidatesRowsAndRewards) {
  const GameSpec bad_row = make_game(
      2, 1, 0.5, {}, [](int, int, const Vector&) { return Vector::Constant(2, 0.7); },
      [](int, int, const Vector&) { return 0.5; });
  EXPECT_THROW(bad_row.transition(0, 0, uniform_distribution(2)), DomainError);
  const GameSpec bad_r = make_game(
      2, 1, 0.5, {}, [](int, int, const Vector&) { return Vector::Constant(2, 0.5); },
      [](int, int, const Vector&) { return 1.5; });
  EXPECT_THROW(bad_r.reward(0, 0, uniform_distribution(2)), DomainError);
}

}  // namespace
}  // namespace mfpma
