#pragma once

// Quadrature building blocks: Gauss-Legendre rules computed by Newton
// iteration on the Legendre recurrence, composite and adaptive 1-D
// integration with an evaluation budget, a product rule for the unit-sphere
// boundary of the model domains, and a seeded Monte Carlo box sampler.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "speclab/common.hpp"

namespace speclab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1]. Nodes are roots of P_n found by
// Newton from the Chebyshev initial guess; symmetric pairs are filled from
// one half so the rule is exactly symmetric.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre needs n >= 1");
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 =
            ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

// The same rule mapped to [a, b].
inline QuadratureRule gauss_legendre_on(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + hw * rule.nodes[i];
    rule.weights[i] *= hw;
  }
  return rule;
}

inline double integrate_rule(const QuadratureRule& rule,
                             const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(rule.nodes[i]);
  }
  return s;
}

namespace detail {

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double b, double whole, double abs_tol, int depth,
                            std::size_t& evals, std::size_t budget,
                            const QuadratureRule& base) {
  const double mid = 0.5 * (a + b);
  auto panel = [&](double lo, double hi) {
    double s = 0.0;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      s += h * base.weights[i] * f(c + h * base.nodes[i]);
    }
    evals += base.nodes.size();
    return s;
  };
  if (evals > budget) {
    throw QuadratureBudgetExceeded("adaptive quadrature exceeded " +
                                   std::to_string(budget) + " evaluations");
  }
  const double left = panel(a, mid);
  const double right = panel(mid, b);
  const double err = std::abs(left + right - whole);
  if (err < abs_tol || depth > 48) return left + right;
  return adaptive_step(f, a, mid, left, 0.5 * abs_tol, depth + 1, evals,
                       budget, base) +
         adaptive_step(f, mid, b, right, 0.5 * abs_tol, depth + 1, evals,
                       budget, base);
}

}  // namespace detail

// Adaptive Gauss-Legendre bisection to an absolute tolerance. Throws
// QuadratureBudgetExceeded once the evaluation budget is spent.
inline double adaptive_integrate(const std::function<double(double)>& f,
                                 double a, double b, double abs_tol = 1e-12,
                                 std::size_t budget = 2000000) {
  if (!(b > a)) return 0.0;
  static const QuadratureRule base = gauss_legendre(15);
  std::size_t evals = 0;
  double whole = 0.0;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    whole += h * base.weights[i] * f(c + h * base.nodes[i]);
  }
  evals += base.nodes.size();
  return detail::adaptive_step(f, a, b, whole, abs_tol, 0, evals, budget, base);
}

// A node of the product rule on the boundary X = {sum_j a_j |z_j|^2 = 1}.
struct BoundaryNode {
  std::vector<Complex> z;
  double weight;  // already includes the surface measure factor
};

// Product quadrature for integrals over X = {sum_j a_j |z_j|^2 = 1} against
// the Euclidean surface measure. Coordinates are z_j = sqrt(v_j/a_j)
// e^{i theta_j} with v on the simplex {sum v_j = 1}; in this chart
//   d sigma = 2^{1-n} sqrt(sum_j a_j v_j) / prod_j a_j
//             dv_1..dv_{n-1} dtheta_1..dtheta_n,
// which reduces to 2^{1-n} dv dtheta on the unit sphere. The simplex is
// mapped from the cube by v_j = s_j prod_{l<j}(1 - s_l) with Jacobian
// prod_l (1-s_l)^{n-2-l} (zero-based l).
inline std::vector<BoundaryNode> ellipsoid_boundary_quadrature(
    const std::vector<double>& a, int points_per_axis) {
  const int n = static_cast<int>(a.size());
  if (n < 1) throw DimensionTooSmall("boundary quadrature needs n >= 1");
  for (double aj : a) {
    if (!(aj > 0.0)) throw NonPositiveValue("ellipsoid coefficients must be > 0");
  }
  const QuadratureRule unit = gauss_legendre_on(points_per_axis, 0.0, 1.0);
  const QuadratureRule angle =
      gauss_legendre_on(points_per_axis, 0.0, 2.0 * kPi);

  std::vector<BoundaryNode> out;
  const int cube_dims = n - 1;
  double prod_a = 1.0;
  for (double aj : a) prod_a *= aj;
  const double scale = std::pow(2.0, 1.0 - static_cast<double>(n)) / prod_a;

  auto emit_for_v = [&](const std::vector<double>& v, double vw) {
    double s_av = 0.0;
    for (int j = 0; j < n; ++j) {
      s_av += a[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
    }
    const double base_w = vw * scale * std::sqrt(s_av);
    std::vector<int> ti(static_cast<std::size_t>(n), 0);
    while (true) {
      BoundaryNode node;
      node.z.resize(static_cast<std::size_t>(n));
      double w = base_w;
      for (int j = 0; j < n; ++j) {
        const double th = angle.nodes[static_cast<std::size_t>(ti[j])];
        node.z[static_cast<std::size_t>(j)] =
            std::sqrt(v[static_cast<std::size_t>(j)] /
                      a[static_cast<std::size_t>(j)]) *
            Complex(std::cos(th), std::sin(th));
        w *= angle.weights[static_cast<std::size_t>(ti[j])];
      }
      node.weight = w;
      out.push_back(std::move(node));
      int d = 0;
      while (d < n) {
        if (++ti[static_cast<std::size_t>(d)] < points_per_axis) break;
        ti[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == n) break;
    }
  };

  if (cube_dims == 0) {
    emit_for_v({1.0}, 1.0);
    return out;
  }
  std::vector<int> ci(static_cast<std::size_t>(cube_dims), 0);
  while (true) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    double rem = 1.0;
    double vw = 1.0;
    for (int j = 0; j < cube_dims; ++j) {
      const double s = unit.nodes[static_cast<std::size_t>(ci[j])];
      v[static_cast<std::size_t>(j)] = s * rem;
      vw *= unit.weights[static_cast<std::size_t>(ci[j])];
      // Chain factor rem per level accumulates to the simplex Jacobian.
      vw *= rem;
      rem *= (1.0 - s);
    }
    v[static_cast<std::size_t>(n - 1)] = rem;
    emit_for_v(v, vw);
    int d = 0;
    while (d < cube_dims) {
      if (++ci[static_cast<std::size_t>(d)] < points_per_axis) break;
      ci[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == cube_dims) break;
  }
  return out;
}

// Mean and standard error of f over N draws from the uniform distribution
// on the box prod_j [lo_j, hi_j], scaled by the box volume: a Monte Carlo
// estimate of the integral of f over the box.
struct MonteCarloEstimate {
  double value;
  double std_error;
  std::uint64_t samples;
};

inline MonteCarloEstimate monte_carlo_box(
    const std::vector<double>& lo, const std::vector<double>& hi,
    std::uint64_t samples, std::uint64_t seed,
    const std::function<double(const std::vector<double>&)>& f) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw ConfigError("monte_carlo_box bounds mismatch");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double volume = 1.0;
  for (std::size_t j = 0; j < lo.size(); ++j) volume *= (hi[j] - lo[j]);
  std::vector<double> x(lo.size());
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 1; i <= samples; ++i) {
    for (std::size_t j = 0; j < lo.size(); ++j) {
      x[j] = lo[j] + (hi[j] - lo[j]) * unif(rng);
    }
    const double y = f(x);
    const double delta = y - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (y - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  MonteCarloEstimate est;
  est.value = volume * mean;
  est.std_error = volume * std::sqrt(var / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

}  // namespace speclab
