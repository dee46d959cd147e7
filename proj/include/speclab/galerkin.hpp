#pragma once

// Galerkin realization of the Toeplitz operator on the monomial basis:
// entries (R phi_beta | phi_alpha) with phi_alpha = z^alpha / ||z^alpha||,
// the inner product computed by numerical quadrature over the domain rather
// than by orthogonality, so diagonality is an output, not an assumption.
// R is applied symbolically: R phi_beta = <lambda, beta> phi_beta.
//
// Quadrature: polar coordinates per complex axis, u_j = a_j r_j^2, which
// reduces the domain to the solid simplex {sum u <= 1} times the n-torus,
// each factor discretized by tensor-product Gauss-Legendre.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/domain.hpp"
#include "speclab/multiindex.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

struct GalerkinQuadrature {
  int radial_points = 0;  // per cube axis; 0 = derived from max degree
  int angle_points = 0;   // per torus axis; 0 = derived from max degree
  std::uint64_t node_budget = 5000000ull;
};

struct GalerkinResult {
  std::vector<MultiIndex> basis;  // graded-lex, |alpha| <= D
  Eigen::MatrixXcd matrix;
};

inline GalerkinResult galerkin_toeplitz_matrix(
    const DomainSpec& domain, const RotationGenerator& gen, int max_degree,
    const GalerkinQuadrature& quad = {}) {
  domain.validate();
  gen.validate();
  if (gen.n() != domain.n) {
    throw ConfigError("generator dimension must equal domain dimension");
  }
  if (max_degree < 0 || max_degree > 12) {
    throw ConfigError("galerkin degree bound must lie in [0, 12]");
  }
  const int n = domain.n;
  // After the simplex map the radial integrand is polynomial of degree
  // <= max_degree + n per axis, which q_s-point Gauss-Legendre integrates
  // exactly; the angle factors e^{i m theta}, |m| <= 2 max_degree, need
  // q_t ~ 4 max_degree + 12 points to fall below 1e-13.
  const int q_s = quad.radial_points > 0 ? quad.radial_points : max_degree + n + 2;
  const int q_t = quad.angle_points > 0 ? quad.angle_points : 4 * max_degree + 12;

  double node_count = 1.0;
  for (int j = 0; j < n; ++j) {
    node_count *= static_cast<double>(q_s) * static_cast<double>(q_t);
  }
  if (node_count > static_cast<double>(quad.node_budget)) {
    throw QuadratureBudgetExceeded(
        "galerkin quadrature needs " + format_double(node_count) +
        " nodes, budget " + std::to_string(quad.node_budget));
  }

  GalerkinResult out;
  out.basis = enumerate_multiindices(n, max_degree);
  const std::size_t nb = out.basis.size();
  std::vector<double> inv_norm(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    inv_norm[i] = std::exp(-0.5 * log_monomial_norm_sq(domain, out.basis[i]));
  }

  const QuadratureRule cube = gauss_legendre_on(q_s, 0.0, 1.0);
  const QuadratureRule angle = gauss_legendre_on(q_t, 0.0, 2.0 * kPi);

  std::size_t angle_nodes = 1;
  for (int j = 0; j < n; ++j) angle_nodes *= static_cast<std::size_t>(q_t);

  Eigen::MatrixXcd phi(static_cast<Eigen::Index>(angle_nodes),
                       static_cast<Eigen::Index>(nb));
  Eigen::VectorXd wvec(static_cast<Eigen::Index>(angle_nodes));
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(
      static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));

  std::vector<int> ci(static_cast<std::size_t>(n), 0);   // cube counters
  std::vector<int> ti(static_cast<std::size_t>(n), 0);   // angle counters
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  std::vector<Complex> z(static_cast<std::size_t>(n));
  while (true) {
    double w = 1.0;
    double rem = 1.0;
    for (int j = 0; j < n; ++j) {
      const double s = cube.nodes[static_cast<std::size_t>(ci[j])];
      u[static_cast<std::size_t>(j)] = s * rem;
      w *= cube.weights[static_cast<std::size_t>(ci[j])] * rem;
      rem *= (1.0 - s);
    }
    for (int j = 0; j < n; ++j) {
      // du = 2 a r dr absorbs the polar Jacobian r dr per axis.
      w /= 2.0 * domain.a[static_cast<std::size_t>(j)];
    }
    std::fill(ti.begin(), ti.end(), 0);
    std::size_t row = 0;
    while (true) {
      double wa = w;
      for (int j = 0; j < n; ++j) {
        const double th = angle.nodes[static_cast<std::size_t>(ti[j])];
        z[static_cast<std::size_t>(j)] =
            std::sqrt(u[static_cast<std::size_t>(j)] /
                      domain.a[static_cast<std::size_t>(j)]) *
            Complex(std::cos(th), std::sin(th));
        wa *= angle.weights[static_cast<std::size_t>(ti[j])];
      }
      wvec[static_cast<Eigen::Index>(row)] = wa;
      for (std::size_t i = 0; i < nb; ++i) {
        Complex v(inv_norm[i], 0.0);
        for (int j = 0; j < n; ++j) {
          for (int p = 0; p < out.basis[i][static_cast<std::size_t>(j)]; ++p) {
            v *= z[static_cast<std::size_t>(j)];
          }
        }
        phi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(i)) = v;
      }
      ++row;
      int d = 0;
      while (d < n) {
        if (++ti[static_cast<std::size_t>(d)] < q_t) break;
        ti[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == n) break;
    }
    gram.noalias() += phi.adjoint() * wvec.asDiagonal() * phi;
    int d = 0;
    while (d < n) {
      if (++ci[static_cast<std::size_t>(d)] < q_s) break;
      ci[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }

  // G_{alpha beta} = (phi_beta | phi_alpha); M_{alpha beta} = <lambda, beta> G.
  out.matrix.resize(static_cast<Eigen::Index>(nb),
                    static_cast<Eigen::Index>(nb));
  for (std::size_t bj = 0; bj < nb; ++bj) {
    const double ev = toeplitz_eigenvalue(gen, out.basis[bj]);
    out.matrix.col(static_cast<Eigen::Index>(bj)) =
        gram.col(static_cast<Eigen::Index>(bj)) * ev;
  }
  return out;
}

}  // namespace speclab
