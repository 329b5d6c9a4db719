// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "mfpma/errors.hpp"
#include "mfpma/mirror.hpp"

namespace mfpma {
namespace {

constexpr double kInterior = 1e-15;

// Enumerates the simplex grid {k/m : sum k = m} in lexicographic order.
void simplex_grid(int n, int m, std::vector<Vector>* out) {
  std::vector<int> k(n, 0);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == n - 1) {
      k[idx] = left;
      Vector u(n);
      for (int i = 0; i < n; ++i) u[i] = static_cast<double>(k[i]) / m;
      out->push_back(u);
      return;
    }
    for (int v = left; v >= 0; --v) {
      k[idx] = v;
      rec(idx + 1, left - v);
    }
  };
  rec(0, m);
}

}  // namespace

Regularizer Regularizer::entropy(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("entropy tau must be positive and finite");
  }
  return Regularizer(RegularizerKind::kEntropy, tau);
}

Regularizer Regularizer::quadratic(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("quadratic tau must be positive and finite");
  }
  return Regularizer(RegularizerKind::kQuadratic, tau);
}

std::string Regularizer::name() const {
  std::ostringstream os;
  os << (kind_ == RegularizerKind::kEntropy ? "entropy" : "quadratic")
     << "(tau=" << tau_ << ")";
  return os.str();
}

double Regularizer::quadratic_scale(int n) const {
  return n > 1 ? tau_ * n / (n - 1.0) : 0.0;
}

double Regularizer::value_unchecked(const double* u, int n) const {
  if (kind_ == RegularizerKind::kEntropy) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (u[i] > 0.0) s -= u[i] * std::log(u[i]);
    }
    return tau_ * s;
  }
  if (n == 1) return 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) sq += u[i] * u[i];
  return quadratic_scale(n) * (1.0 - sq);
}

double Regularizer::value(const Vector& u) const {
  Vector v = u;
  normalize_probabilities(v);
  return value_unchecked(v.data(), static_cast<int>(v.size()));
}

Vector Regularizer::gradient(const Vector& u) const {
  const int n = static_cast<int>(u.size());
  Vector g(n);
  if (kind_ == RegularizerKind::kEntropy) {
    for (int i = 0; i < n; ++i) {
      g[i] = -tau_ * (std::log(std::max(u[i], kInterior)) + 1.0);
    }
  } else {
    g = -2.0 * quadratic_scale(n) * u;
  }
  return g;
}

double Regularizer::h_max(int n) const {
  if (n <= 0) throw DimensionError("need at least one action");
  if (kind_ == RegularizerKind::kEntropy) return tau_ * std::log(n);
  return n > 1 ? tau_ : 0.0;
}

Vector Regularizer::u_max(int n) const { return uniform_distribution(n); }

double Regularizer::rho(int n) const {
  if (kind_ == RegularizerKind::kEntropy) return tau_ / 2.0;
  // Hessian -2c I with c = tau n/(n-1), and ||x||_2^2 >= ||x||_1^2 / n.
  return n > 1 ? 2.0 * quadratic_scale(n) / n : tau_;
}

bool level_set_contains(const Regularizer& h, double delta_h, const Vector& u) {
  if (!(delta_h > 0.0)) throw DomainError("delta_h must be positive");
  const int n = static_cast<int>(u.size());
  return h.value(u) >= h.h_max(n) - delta_h - 1e-12;
}

bool level_set_is_full(const Regularizer& h, int n, double delta_h) {
  // h >= 0 everywhere and vanishes at the vertices.
  return delta_h >= h.h_max(n);
}

double regularization_bias_bound(const Regularizer& h, int n, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("gamma must lie in (0,1)");
  }
  return h.h_max(n) / (1.0 - gamma);
}

PeCertificate certify_pe(const Regularizer& h, int n, double eta, double q_max,
                         double delta_h, std::uint64_t seed) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  PeCertificate cert;
  if (n == 1) {
    cert.holds = true;
    cert.p_inf = 0.9;
    cert.grid_min = 1.0;
    return cert;
  }

  if (h.kind() == RegularizerKind::kEntropy) {
    cert.holds = true;
  } else if (!level_set_is_full(h, n, delta_h)) {
    // The level set is a ball around the uniform vector; it stays inside the
    // open simplex iff its radius is below the distance to a facet.
    const double c = h.quadratic_scale(n);
    const double r2 = (1.0 - (h.h_max(n) - delta_h) / c) - 1.0 / n;
    const double facet2 = 1.0 / (static_cast<double>(n) * (n - 1));
    cert.holds = r2 < facet2;
  }
  if (!cert.holds && h.kind() == RegularizerKind::kQuadratic) {
    // Shell criterion on u = (1-d) e_0 + d u_max with d -> 0.
    const Vector um = h.u_max(n);
    double lim = std::numeric_limits<double>::infinity();
    for (double d = 1e-2; d >= 1e-6 * 0.999; d /= 10.0) {
      Vector u = d * um;
      u[0] += 1.0 - d;
      lim = std::min(lim, h.gradient(u).dot(um - u));
    }
    cert.holds = lim > q_max + 4.0 / eta;
  }
  if (!cert.holds) return cert;

  std::vector<Vector> centres;
  simplex_grid(n, 20, &centres);
  // Keep the work bounded for larger action sets.
  constexpr std::size_t kMaxCentres = 4000;
  std::mt19937_64 rng(seed);
  if (centres.size() > kMaxCentres) {
    std::shuffle(centres.begin(), centres.end(), rng);
    centres.resize(kMaxCentres);
  }
  std::vector<Vector> qs;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vector q(n);
    for (int i = 0; i < n; ++i) q[i] = (mask >> i & 1) ? q_max : 0.0;
    qs.push_back(q);
  }
  std::uniform_real_distribution<double> unif(0.0, q_max);
  for (int k = 0; k < 1000; ++k) {
    Vector q(n);
    for (int i = 0; i < n; ++i) q[i] = unif(rng);
    qs.push_back(q);
  }
  double lo = 1.0;
  for (const Vector& c : centres) {
    for (const Vector& q : qs) {
      lo = std::min(lo, solve_mirror(q, c, eta, h, delta_h).u.minCoeff());
    }
  }
  cert.grid_min = lo;
  cert.p_inf = 0.9 * lo;
  cert.holds = cert.p_inf > 0.0;
  return cert;
}

double gradient_bound(const Regularizer& h, int n, double p_inf) {
  if (!(p_inf > 0.0) || p_inf * n > 1.0 + 1e-12) {
    throw DomainError("p_inf must lie in (0, 1/|A|]");
  }
  if (n == 1) return 0.0;
  // Each partial derivative depends on its own coordinate monotonically, so
  // the spread is maximised by pushing one coordinate up and one down: a
  // vertex of the truncated simplex.
  const double top = 1.0 - (n - 1) * p_inf;
  Vector u = Vector::Constant(n, p_inf);
  u[0] = std::max(top, p_inf);
  const Vector g = h.gradient(u);
  return 0.5 * (g.maxCoeff() - g.minCoeff());
}

}  // namespace mfpma
