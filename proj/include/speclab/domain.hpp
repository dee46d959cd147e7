#pragma once

// Model strictly pseudoconvex domains
//   Omega = { z in C^n : sum_j a_j |z_j|^2 < 1 },  a_j > 0,
// the unit ball when every a_j = 1. Monomials z^alpha are orthogonal on
// Omega (and on its boundary for the ball), with closed-form squared norms:
//   ball:       ||z^alpha||^2 = pi^n alpha! / (n + |alpha|)!
//   ellipsoid:  ball value / prod_j a_j^(alpha_j + 1)
//   sphere:     2 pi^n alpha! / (n - 1 + |alpha|)!   (surface measure)
// Norms are stored as logs; high degrees overflow double otherwise.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/multiindex.hpp"
#include "speclab/quadrature.hpp"

namespace speclab {

struct DomainSpec {
  int n = 1;
  std::vector<double> a;  // coefficient per coordinate, all 1 for the ball

  bool is_ball() const {
    for (double aj : a) {
      if (aj != 1.0) return false;
    }
    return true;
  }

  std::string kind() const { return is_ball() ? "ball" : "ellipsoid"; }

  void validate() const {
    if (n < 1) throw DimensionTooSmall("domain dimension must be >= 1");
    if (static_cast<int>(a.size()) != n) {
      throw ConfigError("domain coefficient count must equal n");
    }
    for (double aj : a) {
      if (!(aj > 0.0)) {
        throw NonPositiveValue("domain coefficients must be > 0");
      }
    }
  }
};

inline DomainSpec Ball(int n) {
  DomainSpec d;
  d.n = n;
  d.a.assign(static_cast<std::size_t>(std::max(n, 0)), 1.0);
  d.validate();
  return d;
}

inline DomainSpec HermitianEllipsoid(int n, std::vector<double> a) {
  DomainSpec d;
  d.n = n;
  d.a = std::move(a);
  d.validate();
  return d;
}

inline void check_alpha(const DomainSpec& domain, const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != domain.n) {
    throw ConfigError("multi-index length must equal domain dimension");
  }
  for (int aj : alpha) {
    if (aj < 0) throw NonPositiveAlpha("multi-index entries must be >= 0");
  }
}

// log ||z^alpha||^2 over the domain interior (Lebesgue measure on C^n).
inline double log_monomial_norm_sq(const DomainSpec& domain,
                                   const MultiIndex& alpha) {
  domain.validate();
  check_alpha(domain, alpha);
  const int n = domain.n;
  double log_fact = 0.0;
  int total = 0;
  for (int j = 0; j < n; ++j) {
    const int aj = alpha[static_cast<std::size_t>(j)];
    log_fact += std::lgamma(static_cast<double>(aj) + 1.0);
    total += aj;
  }
  double log_ball = static_cast<double>(n) * std::log(kPi) + log_fact -
                    std::lgamma(static_cast<double>(n + total) + 1.0);
  double shift = 0.0;
  for (int j = 0; j < n; ++j) {
    shift += (static_cast<double>(alpha[static_cast<std::size_t>(j)]) + 1.0) *
             std::log(domain.a[static_cast<std::size_t>(j)]);
  }
  return log_ball - shift;
}

inline double monomial_norm_sq(const DomainSpec& domain,
                               const MultiIndex& alpha) {
  return std::exp(log_monomial_norm_sq(domain, alpha));
}

// log of the squared monomial norm on the unit sphere |z| = 1 against the
// Euclidean surface measure. Defined for the ball only.
inline double log_sphere_monomial_norm_sq(int n, const MultiIndex& alpha) {
  if (n < 1) throw DimensionTooSmall("sphere norms need n >= 1");
  if (static_cast<int>(alpha.size()) != n) {
    throw ConfigError("multi-index length must equal dimension");
  }
  double log_fact = 0.0;
  int total = 0;
  for (int aj : alpha) {
    if (aj < 0) throw NonPositiveAlpha("multi-index entries must be >= 0");
    log_fact += std::lgamma(static_cast<double>(aj) + 1.0);
    total += aj;
  }
  return std::log(2.0) + static_cast<double>(n) * std::log(kPi) + log_fact -
         std::lgamma(static_cast<double>(n + total));
}

inline double sphere_monomial_norm_sq(int n, const MultiIndex& alpha) {
  return std::exp(log_sphere_monomial_norm_sq(n, alpha));
}

// Monte Carlo estimate of ||z^alpha||^2 by rejection sampling the bounding
// box prod_j [-1/sqrt(a_j), 1/sqrt(a_j)]^2. Returns the estimate and its
// standard error; the seed makes runs reproducible.
inline MonteCarloEstimate monomial_norm_sq_oracle(const DomainSpec& domain,
                                                  const MultiIndex& alpha,
                                                  std::uint64_t samples,
                                                  std::uint64_t seed) {
  domain.validate();
  check_alpha(domain, alpha);
  const int n = domain.n;
  std::vector<double> lo(static_cast<std::size_t>(2 * n));
  std::vector<double> hi(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) {
    const double r = 1.0 / std::sqrt(domain.a[static_cast<std::size_t>(j)]);
    lo[static_cast<std::size_t>(2 * j)] = -r;
    hi[static_cast<std::size_t>(2 * j)] = r;
    lo[static_cast<std::size_t>(2 * j + 1)] = -r;
    hi[static_cast<std::size_t>(2 * j + 1)] = r;
  }
  return monte_carlo_box(
      lo, hi, samples, seed, [&](const std::vector<double>& x) {
        double rho = -1.0;
        for (int j = 0; j < n; ++j) {
          const double xr = x[static_cast<std::size_t>(2 * j)];
          const double xi = x[static_cast<std::size_t>(2 * j + 1)];
          rho += domain.a[static_cast<std::size_t>(j)] * (xr * xr + xi * xi);
        }
        if (rho >= 0.0) return 0.0;
        double f = 1.0;
        for (int j = 0; j < n; ++j) {
          const double xr = x[static_cast<std::size_t>(2 * j)];
          const double xi = x[static_cast<std::size_t>(2 * j + 1)];
          const double m2 = xr * xr + xi * xi;
          for (int p = 0; p < alpha[static_cast<std::size_t>(j)]; ++p) f *= m2;
        }
        return f;
      });
}

// Exact reproducing kernel of the Bergman space of the unit ball:
//   K(z, w) = n! / (pi^n (1 - <z, w>)^{n+1}),  <z, w> = sum_j z_j conj(w_j).
inline Complex bergman_kernel_exact_ball(int n, const std::vector<Complex>& z,
                                         const std::vector<Complex>& w) {
  if (n < 1) throw DimensionTooSmall("kernel needs n >= 1");
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != n) {
    throw ConfigError("point dimension must equal n");
  }
  Complex dot(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    dot += z[static_cast<std::size_t>(j)] *
           std::conj(w[static_cast<std::size_t>(j)]);
  }
  // For interior points |<z,w>| < 1 strictly; a pairing this close to 1
  // means the pole dominates every retained digit.
  if (std::abs(Complex(1.0, 0.0) - dot) < 1e-12) {
    throw NearSingular("kernel pole: |1 - <z,w>| < 1e-12");
  }
  double nfact = 1.0;
  for (int j = 2; j <= n; ++j) nfact *= static_cast<double>(j);
  return nfact / pi_pow(n) *
         std::pow(Complex(1.0, 0.0) - dot, -static_cast<double>(n + 1));
}

// Boundary quadrature nodes on X = {sum_j a_j |z_j|^2 = 1} against the
// Euclidean surface measure.
inline std::vector<BoundaryNode> boundary_quadrature(const DomainSpec& domain,
                                                     int points_per_axis) {
  domain.validate();
  return ellipsoid_boundary_quadrature(domain.a, points_per_axis);
}

// Table of log monomial norms up to a degree bound, exportable to CSV and
// re-importable byte for byte.
struct NormTable {
  DomainSpec domain;
  int max_degree = 0;
  std::vector<MultiIndex> alphas;     // graded-lex order
  std::vector<double> log_norm_sq;    // parallel to alphas

  static NormTable build(const DomainSpec& domain, int max_degree,
                         std::uint64_t budget = 10000000ull) {
    NormTable t;
    t.domain = domain;
    t.max_degree = max_degree;
    t.alphas = enumerate_multiindices(domain.n, max_degree, budget);
    t.log_norm_sq.reserve(t.alphas.size());
    for (const MultiIndex& a : t.alphas) {
      t.log_norm_sq.push_back(log_monomial_norm_sq(domain, a));
    }
    return t;
  }

  std::string to_csv() const {
    std::ostringstream out;
    for (int j = 1; j <= domain.n; ++j) {
      out << "alpha_" << j << ",";
    }
    out << "log_norm_sq\n";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      for (int v : alphas[i]) out << v << ",";
      out << format_double(log_norm_sq[i]) << "\n";
    }
    return out.str();
  }

  void write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << to_csv();
  }

  static NormTable from_csv(const std::string& text, const DomainSpec& domain) {
    NormTable t;
    t.domain = domain;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty norm table");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string cell;
      MultiIndex a;
      for (int j = 0; j < domain.n; ++j) {
        if (!std::getline(row, cell, ',')) {
          throw ConfigError("norm table row too short");
        }
        a.push_back(std::stoi(cell));
      }
      if (!std::getline(row, cell, ',')) {
        throw ConfigError("norm table row missing value");
      }
      t.alphas.push_back(std::move(a));
      t.log_norm_sq.push_back(std::stod(cell));
      t.max_degree = std::max(t.max_degree, degree(t.alphas.back()));
    }
    return t;
  }
};

}  // namespace speclab
