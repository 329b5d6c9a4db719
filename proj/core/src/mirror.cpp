// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "mfpma/errors.hpp"

namespace mfpma {
namespace {

Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

double log_sum_exp(const Vector& z) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

// Entropy case with a prox term: coordinates solve
//   k log u_a + b u_a = y_a - nu,   k = w tau, b = 1/eta,
// and nu is found by Newton on the convex decreasing map nu -> sum_a u_a - 1,
// started from the left of the root so the iterates never overshoot.
Vector entropy_prox_argmax(const Vector& y, double k, double b) {
  const int n = static_cast<int>(y.size());
  const double shift = std::log(b / k);
  Vector u(n);
  auto eval = [&](double nu, double* slope) {
    double sum = 0.0, d = 0.0;
    for (int a = 0; a < n; ++a) {
      u[a] = (k / b) * wright_omega((y[a] - nu) / k + shift);
      sum += u[a];
      d += u[a] / (k + b * u[a]);
    }
    *slope = d;
    return sum - 1.0;
  };
  double nu = (y.array() - b).maxCoeff();  // sum u >= 1 here
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double f = eval(nu, &slope);
    if (f <= 4e-16 * n || slope <= 0.0) break;
    const double step = f / slope;
    nu += step;
    if (step <= 1e-16 * std::max(1.0, std::abs(nu))) {
      eval(nu, &slope);
      break;
    }
  }
  return u / u.sum();
}

// argmax over the simplex of <u,g> + w h(u) - (b/2)||u - c||^2.
Vector weighted_argmax(const Vector& g, const Vector& c, double b, double w,
                       const Regularizer& h) {
  const int n = static_cast<int>(g.size());
  if (n == 1) return Vector::Ones(1);
  if (w == 0.0) {
    if (b == 0.0) throw SolverFailure("degenerate linear mirror problem");
    return project_simplex(c + g / b);
  }
  if (h.kind() == RegularizerKind::kQuadratic) {
    const double denom = 2.0 * w * h.quadratic_scale(n) + b;
    return project_simplex((g + b * c) / denom);
  }
  const double k = w * h.tau();
  if (b == 0.0) return softmax(g / k);
  const Vector y = (g + b * c).array() - k;
  return entropy_prox_argmax(y, k, b);
}

struct Constrained {
  Vector u;
  double multiplier;
};

// Adds the level constraint h(u) >= h_max - delta_h through its multiplier:
// the solution for weight w0 + lambda has h nondecreasing in lambda.
Constrained constrained_argmax(const Vector& g, const Vector& c, double b,
                               double w0, const Regularizer& h,
                               double delta_h) {
  const int n = static_cast<int>(g.size());
  Vector u = weighted_argmax(g, c, b, w0, h);
  if (level_set_is_full(h, n, delta_h)) return {u, 0.0};
  const double target = h.h_max(n) - delta_h;
  auto level = [&](const Vector& v) {
    return h.value_unchecked(v.data(), n);
  };
  if (level(u) >= target) return {u, 0.0};

  double lo = 0.0, hi = 1.0;
  Vector u_hi = weighted_argmax(g, c, b, w0 + hi, h);
  while (level(u_hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) {
      throw SolverFailure("level-set multiplier search did not bracket");
    }
    u_hi = weighted_argmax(g, c, b, w0 + hi, h);
  }
  // h(u(lambda)) is nondecreasing in lambda; the right end of the final
  // bracket stays feasible.
  auto f = [&](double lam) {
    return level(weighted_argmax(g, c, b, w0 + lam, h)) - target;
  };
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  hi = bracket.second;
  u_hi = weighted_argmax(g, c, b, w0 + hi, h);
  return {u_hi, hi};
}

double kkt_residual(const Vector& u, const Vector& grad) {
  double nu = 0.0;
  int support = 0;
  for (Eigen::Index a = 0; a < u.size(); ++a) {
    if (u[a] > 0.0) {
      nu += grad[a];
      ++support;
    }
  }
  nu /= std::max(support, 1);
  double r = 0.0;
  for (Eigen::Index a = 0; a < u.size(); ++a) {
    const double d = grad[a] - nu;
    r = std::max(r, u[a] > 0.0 ? std::abs(d) : std::max(0.0, d));
  }
  return r;
}

// Gradient of h without interior clamping; entries with u_a = 0 are left at
// -inf for entropy and treated as off-support by kkt_residual.
Vector exact_gradient(const Regularizer& h, const Vector& u) {
  if (h.kind() == RegularizerKind::kQuadratic) return h.gradient(u);
  Vector g(u.size());
  for (Eigen::Index a = 0; a < u.size(); ++a) {
    g[a] = u[a] > 0.0 ? -h.tau() * (std::log(u[a]) + 1.0)
                      : -std::numeric_limits<double>::infinity();
  }
  return g;
}

double finite_max_abs(const Vector& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) m = std::max(m, std::abs(v[i]));
  }
  return m;
}

void check_row_inputs(const Vector& q, const Vector& centre, double eta) {
  if (q.size() == 0 || q.size() != centre.size()) {
    throw DimensionError("mirror problem: q and centre sizes differ");
  }
  if (!q.allFinite()) throw DomainError("mirror problem: q must be finite");
  if (!(eta > 0.0)) throw DomainError("mirror problem: eta must be positive");
}

}  // namespace

double wright_omega(double z) {
  // omega(z) = W0(e^z) while e^z is representable.
  if (z < 700.0) return boost::math::lambert_w0(std::exp(z));
  // Asymptotic start, then Newton on w + log w = z.
  double w = z - std::log(z);
  for (int i = 0; i < 4; ++i) {
    w = w * (1.0 + z - std::log(w)) / (1.0 + w);
  }
  return w;
}

Vector project_simplex(const Vector& y) {
  const int n = static_cast<int>(y.size());
  if (n == 0) throw DimensionError("project_simplex: empty input");
  std::vector<double> s(y.data(), y.data() + n);
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int j = 0; j < n; ++j) {
    cum += s[j];
    const double t = (cum - 1.0) / (j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  Vector u = (y.array() - theta).max(0.0).matrix();
  return u / u.sum();
}

Vector project_level_set(const Vector& y, const Regularizer& h,
                         double delta_h) {
  if (!(delta_h > 0.0)) throw DomainError("delta_h must be positive");
  const Vector zero = Vector::Zero(y.size());
  return constrained_argmax(zero, y, 1.0, 0.0, h, delta_h).u;
}

double mirror_objective(const Vector& u, const Vector& q, const Vector& centre,
                        double eta, const Regularizer& h) {
  const double prox =
      std::isinf(eta) ? 0.0 : (u - centre).squaredNorm() / (2.0 * eta);
  return u.dot(q) + h.value_unchecked(u.data(), static_cast<int>(u.size())) -
         prox;
}

MirrorSolution solve_mirror(const Vector& q, const Vector& centre, double eta,
                            const Regularizer& h, double delta_h, double tol) {
  check_row_inputs(q, centre, eta);
  if (!(delta_h > 0.0)) throw DomainError("delta_h must be positive");
  Vector c = centre;
  normalize_probabilities(c);
  const double b = std::isinf(eta) ? 0.0 : 1.0 / eta;

  Constrained sol = constrained_argmax(q, c, b, 1.0, h, delta_h);
  MirrorSolution out;
  out.u = std::move(sol.u);
  out.multiplier = sol.multiplier;
  out.objective = mirror_objective(out.u, q, c, eta, h);
  const Vector hg = exact_gradient(h, out.u);
  const Vector grad = q + (1.0 + sol.multiplier) * hg - b * (out.u - c);
  out.residual = kkt_residual(out.u, grad);
  const int n = static_cast<int>(q.size());
  const double modulus = h.rho(n) + b / n;
  // Rounding floor: the terms entering the gradient can be large (tiny eta).
  const double scale = q.cwiseAbs().maxCoeff() +
                       (1.0 + sol.multiplier) * finite_max_abs(hg) +
                       b * (out.u - c).cwiseAbs().maxCoeff() + 1.0;
  if (out.residual > std::sqrt(2.0 * tol * modulus) + 1e-11 * scale) {
    std::ostringstream os;
    os << "mirror step did not certify: KKT residual " << out.residual;
    throw SolverFailure(os.str());
  }
  return out;
}

Policy pma_step(const QFunction& q, const Policy& pi, double eta,
                const Regularizer& h, double delta_h, double tol) {
  if (q.rows() != pi.num_states() || q.cols() != pi.num_actions()) {
    throw DimensionError("pma_step: q and policy shapes differ");
  }
  Matrix out(pi.num_states(), pi.num_actions());
  for (int s = 0; s < pi.num_states(); ++s) {
    out.row(s) = solve_mirror(q.row(s).transpose(), pi.row(s), eta, h,
                              delta_h, tol)
                     .u.transpose();
  }
  return Policy(std::move(out));
}

ConcaveSolution solve_concave_simplex(const Vector& q, const Regularizer& h) {
  if (q.size() == 0) throw DimensionError("solve_concave_simplex: empty q");
  if (!q.allFinite()) throw DomainError("solve_concave_simplex: q not finite");
  ConcaveSolution out;
  if (h.kind() == RegularizerKind::kEntropy) {
    const Vector z = q / h.tau();
    out.u = softmax(z);
    out.value = h.tau() * log_sum_exp(z);
  } else {
    out.u = weighted_argmax(q, Vector::Zero(q.size()), 0.0, 1.0, h);
    out.value = out.u.dot(q) +
                h.value_unchecked(out.u.data(), static_cast<int>(q.size()));
  }
  return out;
}

}  // namespace mfpma
