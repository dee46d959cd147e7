#pragma once

// CR geometry of the boundary X = {rho = 0}. Real coordinates interleave as
// (x_1, y_1, ..., x_n, y_n) with z_j = x_j + i y_j; the complex structure J
// sends d/dx_j to d/dy_j. The contact form is
//   omega_0 = sum_j (-rho_{y_j} dx_j + rho_{x_j} dy_j) = -d rho o J,
// and the Levi form is computed in an orthonormal frame of the holomorphic
// tangent space T^{1,0}X, where "orthonormal" is with respect to the
// Hermitian pairing <U|V> = (1/2) sum_j U_j conj(V_j) induced by the
// Euclidean metric (so frame columns have standard norm sqrt(2)).

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/domain.hpp"

namespace speclab {

using RealVec = Eigen::VectorXd;

inline RealVec embed_point(const std::vector<Complex>& z) {
  RealVec x(2 * static_cast<Eigen::Index>(z.size()));
  for (std::size_t j = 0; j < z.size(); ++j) {
    x[2 * static_cast<Eigen::Index>(j)] = z[j].real();
    x[2 * static_cast<Eigen::Index>(j) + 1] = z[j].imag();
  }
  return x;
}

inline std::vector<Complex> complex_point(const RealVec& x) {
  std::vector<Complex> z(static_cast<std::size_t>(x.size() / 2));
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = Complex(x[2 * static_cast<Eigen::Index>(j)],
                   x[2 * static_cast<Eigen::Index>(j) + 1]);
  }
  return z;
}

// J acting on interleaved real vectors: (dx_j, dy_j) -> (-dy_j, dx_j) slots.

inline RealVec j_apply(const RealVec& v) {
  RealVec out(v.size());
  for (Eigen::Index j = 0; j + 1 < v.size(); j += 2) {
    out[j] = -v[j + 1];
    out[j + 1] = v[j];
  }
  return out;
}

// A defining function with enough derivative data for the operations below.
// value and gradient are available everywhere; complex_hessian of a
// normalized function is only guaranteed on the boundary (the term
// proportional to rho itself is dropped there). real_hessian may be null
// for normalized functions; it is only consumed during normalization.
struct DefiningFunction {
  int n = 0;
  bool normalized = false;
  std::function<double(const RealVec&)> value;
  std::function<RealVec(const RealVec&)> gradient;
  std::function<Eigen::MatrixXd(const RealVec&)> real_hessian;
  std::function<Eigen::MatrixXcd(const RealVec&)> complex_hessian;
};

// rho(z) = sum_j a_j |z_j|^2 - 1 for the model domains.
inline DefiningFunction model_defining_function(const DomainSpec& domain) {
  domain.validate();
  DefiningFunction f;
  f.n = domain.n;
  f.normalized = false;
  const std::vector<double> a = domain.a;
  const int n = domain.n;
  f.value = [a, n](const RealVec& x) {
    double s = -1.0;
    for (int j = 0; j < n; ++j) {
      s += a[static_cast<std::size_t>(j)] *
           (x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1]);
    }
    return s;
  };
  f.gradient = [a, n](const RealVec& x) {
    RealVec g(2 * n);
    for (int j = 0; j < n; ++j) {
      g[2 * j] = 2.0 * a[static_cast<std::size_t>(j)] * x[2 * j];
      g[2 * j + 1] = 2.0 * a[static_cast<std::size_t>(j)] * x[2 * j + 1];
    }
    return g;
  };
  f.real_hessian = [a, n](const RealVec&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
      h(2 * j, 2 * j) = 2.0 * a[static_cast<std::size_t>(j)];
      h(2 * j + 1, 2 * j + 1) = 2.0 * a[static_cast<std::size_t>(j)];
    }
    return h;
  };
  f.complex_hessian = [a, n](const RealVec&) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      h(j, j) = Complex(a[static_cast<std::size_t>(j)], 0.0);
    }
    return h;
  };
  return f;
}

// Wirtinger gradient (d rho / d z_j) from the interleaved real gradient.
inline Eigen::VectorXcd wirtinger_gradient(const RealVec& grad) {
  const Eigen::Index n = grad.size() / 2;
  Eigen::VectorXcd p(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p[j] = 0.5 * Complex(grad[2 * j], -grad[2 * j + 1]);
  }
  return p;
}

// Rescales rho to rho_hat = rho / |grad rho| so that |grad rho_hat| = 1 on
// the boundary. Derivatives follow the product rule; the complex Hessian of
// the result is valid on the boundary, where the term rho * dd^bar(1/|grad
// rho|) vanishes, and refuses evaluation elsewhere.
inline DefiningFunction normalize_defining_function(const DefiningFunction& raw,
                                                    const RealVec& x0) {
  if (raw.normalized) return raw;
  if (!raw.real_hessian) {
    throw ConfigError("normalization needs the real Hessian of the raw function");
  }
  const double g0 = raw.gradient(x0).norm();
  if (g0 < 1e-8) {
    throw DegenerateGradient("gradient norm " + format_double(g0) +
                             " at the anchor point is below 1e-8");
  }
  DefiningFunction out;
  out.n = raw.n;
  out.normalized = true;
  auto value = raw.value;
  auto gradient = raw.gradient;
  auto real_hessian = raw.real_hessian;
  auto complex_hessian = raw.complex_hessian;

  out.value = [value, gradient](const RealVec& x) {
    const double gn = gradient(x).norm();
    if (gn < 1e-12) {
      throw DegenerateGradient("cannot normalize at a critical point");
    }
    return value(x) / gn;
  };
  out.gradient = [value, gradient, real_hessian](const RealVec& x) {
    const RealVec g = gradient(x);
    const double gn = g.norm();
    if (gn < 1e-12) {
      throw DegenerateGradient("cannot normalize at a critical point");
    }
    // grad(rho/|grad rho|) = grad rho / |grad rho| + rho * grad(1/|grad rho|).
    const RealVec hg = real_hessian(x) * g;
    return RealVec(g / gn - value(x) * hg / (gn * gn * gn));
  };
  out.real_hessian = nullptr;
  out.complex_hessian = [value, gradient, real_hessian,
                         complex_hessian](const RealVec& x) {
    const RealVec g = gradient(x);
    const double gn = g.norm();
    if (gn < 1e-12) {
      throw DegenerateGradient("cannot normalize at a critical point");
    }
    const double rho_hat = value(x) / gn;
    if (std::abs(rho_hat) > 1e-8) {
      throw NotOnBoundary(
          "normalized complex Hessian is only defined on the boundary; "
          "|rho_hat| = " +
          format_double(std::abs(rho_hat)));
    }
    const Eigen::Index n = x.size() / 2;
    const Eigen::VectorXcd dz_rho = wirtinger_gradient(g);
    const RealVec grad_inv = RealVec(-(real_hessian(x) * g) / (gn * gn * gn));
    const Eigen::VectorXcd dz_inv = wirtinger_gradient(grad_inv);
    Eigen::MatrixXcd h = complex_hessian(x) / gn;
    // d_j d_kbar (g rho) = g rho_{j kbar} + g_j conj(rho_k) + rho_j conj(g_k)
    // on the boundary (g real, rho real).
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        h(j, k) += dz_inv[j] * std::conj(dz_rho[k]) +
                   dz_rho[j] * std::conj(dz_inv[k]);
      }
    }
    return h;
  };
  return out;
}

// Contact form coefficients at x, as a covector on interleaved vectors:
// omega_0(v) = dot(omega0_at(rho, x), v). Only defined on the boundary of a
// normalized defining function.
inline RealVec omega0_at(const DefiningFunction& rho, const RealVec& x) {
  if (!rho.normalized) {
    throw ConfigError("omega0_at expects a normalized defining function");
  }
  if (std::abs(rho.value(x)) > 1e-8) {
    throw NotOnBoundary("contact form requested off the boundary: rho = " +
                        format_double(rho.value(x)));
  }
  const RealVec g = rho.gradient(x);
  RealVec w(g.size());
  for (Eigen::Index j = 0; j + 1 < g.size(); j += 2) {
    w[j] = -g[j + 1];
    w[j + 1] = g[j];
  }
  return w;
}

// The direction J grad(rho); for a normalized defining function this pairs
// to 1 with omega_0 on the boundary.
inline RealVec reeb_direction(const DefiningFunction& rho, const RealVec& x) {
  return j_apply(rho.gradient(x));
}

struct LeviSpectrum {
  std::vector<double> eigenvalues;  // ascending
  double det_levi = 1.0;
  Eigen::MatrixXcd frame;  // rows: T^{1,0}X frame vectors, std norm sqrt(2)
  bool all_positive = true;
};

// Levi form of rho at a boundary point x, as the matrix of the complex
// Hessian restricted to T^{1,0}X in an orthonormal frame. The frame is
// built by Gram-Schmidt over the coordinate vectors projected off the
// holomorphic normal, taken in index order (vectors that project to nearly
// zero are skipped). For n = 1 the holomorphic tangent space is zero
// dimensional: the spectrum is empty and det_levi = 1 by convention.
inline LeviSpectrum levi_spectrum(const DefiningFunction& rho,
                                  const RealVec& x) {
  const double val = rho.value(x);
  if (std::abs(val) > 1e-8) {
    throw NotOnBoundary("levi_spectrum needs |rho(x)| <= 1e-8, got " +
                        format_double(val));
  }
  const Eigen::Index n = x.size() / 2;
  LeviSpectrum out;
  if (n < 2) {
    out.frame = Eigen::MatrixXcd::Zero(0, n);
    return out;
  }
  const RealVec g = rho.gradient(x);
  if (g.norm() < 1e-8) {
    throw DegenerateGradient("levi_spectrum at a critical point");
  }
  const Eigen::VectorXcd p = wirtinger_gradient(g);
  // U is tangent iff sum_j p_j U_j = 0, i.e. U is orthogonal to conj(p).
  const Eigen::VectorXcd normal = p.conjugate() / p.norm();

  Eigen::MatrixXcd frame(n - 1, n);
  Eigen::Index got = 0;
  for (Eigen::Index j = 0; j < n && got < n - 1; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v[j] = 1.0;
    v -= normal * (normal.dot(v));
    for (Eigen::Index r = 0; r < got; ++r) {
      const Eigen::VectorXcd u = frame.row(r).transpose();
      v -= u * (u.dot(v)) / u.squaredNorm();
    }
    if (v.norm() < 1e-10) continue;
    v *= std::sqrt(2.0) / v.norm();
    frame.row(got++) = v.transpose();
  }
  if (got != n - 1) {
    throw DegenerateGradient("could not complete a tangent frame");
  }

  const Eigen::MatrixXcd h = rho.complex_hessian(x);
  const Eigen::MatrixXcd m = frame * h * frame.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  out.eigenvalues.assign(es.eigenvalues().data(),
                         es.eigenvalues().data() + (n - 1));
  out.det_levi = 1.0;
  for (double ev : out.eigenvalues) {
    out.det_levi *= ev;
    if (ev <= 0.0) out.all_positive = false;
  }
  out.frame = frame;
  return out;
}

struct ReebDecomposition {
  double alpha = 0.0;     // omega_0(field) at x
  RealVec cr_component;   // field - alpha * J grad(rho), lies in ker d rho
};

// Splits a tangent vector field value at x against the contact structure:
// field = alpha * T + Z with T = J grad(rho) and Z in the kernel of both
// d rho and omega_0 (the latter requires a normalized rho). The field must
// be tangent to X at x and must pair positively with omega_0.
inline ReebDecomposition decompose_reeb_like(const DefiningFunction& rho,
                                             const RealVec& x,
                                             const RealVec& field) {
  if (!rho.normalized) {
    throw ConfigError("decompose_reeb_like expects a normalized defining function");
  }
  const double val = rho.value(x);
  if (std::abs(val) > 1e-8) {
    throw NotOnBoundary("decompose_reeb_like needs a boundary point");
  }
  const RealVec g = rho.gradient(x);
  const double tangency = std::abs(g.dot(field));
  if (tangency > 1e-8) {
    throw NotTangent("field pairs with d rho: " + format_double(tangency));
  }
  const RealVec w = omega0_at(rho, x);
  const double alpha = w.dot(field);
  if (alpha <= 0.0) {
    throw NonPositiveAlpha("omega_0(field) = " + format_double(alpha) +
                           " must be positive");
  }
  ReebDecomposition out;
  out.alpha = alpha;
  out.cr_component = field - alpha * j_apply(g);
  // Z must land in the contact distribution: annihilated by both d rho and
  // omega_0 up to roundoff in the inputs.
  const double zn = out.cr_component.norm();
  const double slack = 1e-10 * zn + 1e-12;
  if (std::abs(g.dot(out.cr_component)) > slack + tangency ||
      std::abs(w.dot(out.cr_component)) > slack) {
    throw NotTangent("CR component escapes the contact distribution");
  }
  return out;
}

}  // namespace speclab
