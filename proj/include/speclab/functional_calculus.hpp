#pragma once

// Two routes from a Hermitian matrix A and a bump profile chi to chi(A / k):
//
//  * apply_chi_eigendecomposition: diagonalize and map eigenvalues. Exact up
//    to the eigensolver; serves as the oracle.
//  * helffer_sjostrand_chi: contour-free functional calculus,
//        f(A) = -(1/pi) int_C dbar(f_tilde)(z) (z - A)^{-1} dm(z),
//    with f_tilde an almost-analytic extension of f(x) = chi(x/k) built from
//    an order-N Taylor strip and a smooth vertical cutoff. Never touches the
//    spectrum of A, so it exercises the resolvent route independently.
//
// The extension is supported on x in [k t_min, k t_max]; f and every
// derivative vanish at those endpoints, so truncating the plane integral to
// that strip is exact. Conjugate symmetry dbar(f_tilde)(conj z) =
// conj(dbar(f_tilde)(z)) and (conj(z) - A)^{-1} = ((z - A)^{-1})^* reduce the
// integral to the upper half plane: f(A) = -(1/pi)(S + S^*).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "speclab/chi.hpp"
#include "speclab/common.hpp"
#include "speclab/quadrature.hpp"

namespace speclab {

inline void require_hermitian(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) {
    throw ConfigError("functional calculus needs a square matrix");
  }
  const double scale = 1.0 + a.norm();
  if ((a - a.adjoint()).norm() > 1e-10 * scale) {
    throw ConfigError("functional calculus needs a hermitian matrix");
  }
}

inline Eigen::MatrixXcd apply_chi_eigendecomposition(const Eigen::MatrixXcd& a,
                                                     const ChiProfile& chi,
                                                     int k) {
  require_hermitian(a);
  if (k < 1) throw ConfigError("scale k must be a positive integer");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) {
    throw ResolventIllConditioned("eigendecomposition failed to converge");
  }
  Eigen::VectorXd mapped = es.eigenvalues();
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    mapped[i] = chi.scaled(mapped[i], k);
  }
  return es.eigenvectors() * mapped.asDiagonal() *
         es.eigenvectors().adjoint();
}

struct HelfferSjostrandOptions {
  // The Cauchy-Pompeiu identity is exact for any C^1 extension, so the
  // extension order only shapes the integrand: high orders inflate the
  // Taylor coefficients factorially near the support edges and stall the
  // quadrature. N = 4 keeps the integrand gentle (dbar ~ y^4 on the axis)
  // while far above the y^1 integrability floor.
  int order = 4;             // Taylor order N of the extension
  double height_factor = 0.1;  // strip height Y = factor * k * chi.radius
  int x_panels = 8;
  int y_panels = 4;          // split evenly across [0, Y/2] and [Y/2, Y]
  int points = 24;           // Gauss-Legendre points per panel and direction
  int max_refinements = 6;
  double tolerance = 1e-9;   // self-convergence gate on the plane integral
  int max_size = 200;
};

namespace detail {

// Smooth partition step: psi = 0 for s <= 0, 1 for s >= 1, C^infinity.
inline double bump_step(double s) {
  auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double fs = f(s);
  const double gs = f(1.0 - s);
  return fs + gs > 0.0 ? fs / (fs + gs) : 0.0;
}

inline double bump_step_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  auto fp = [](double t) {
    return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
  };
  const double fs = f(s);
  const double gs = f(1.0 - s);
  const double den = fs + gs;
  if (den <= 0.0) return 0.0;
  return (fp(s) * gs + fs * fp(1.0 - s)) / (den * den);
}

// LU factorization with partial pivoting of the tridiagonal z*I - T,
// T real symmetric with diagonal d and subdiagonal e; then solves for the
// full inverse column by column. Pivoting fills one extra superdiagonal.
class ShiftedTridiagonalSolver {
 public:
  ShiftedTridiagonalSolver(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                           Complex z)
      : m_(d.size()), dl_(std::max<Eigen::Index>(m_ - 1, 0)),
        dd_(m_), du_(std::max<Eigen::Index>(m_ - 1, 0)),
        du2_(std::max<Eigen::Index>(m_ - 2, 0)), swap_(m_ > 0 ? m_ - 1 : 0) {
    for (Eigen::Index i = 0; i < m_; ++i) dd_[i] = z - d[i];
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      dl_[i] = -e[i];
      du_[i] = -e[i];
    }
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      if (std::abs(dd_[i]) >= std::abs(dl_[i])) {
        swap_[i] = false;
        if (std::abs(dd_[i]) == 0.0) {
          throw ResolventIllConditioned("singular shifted tridiagonal pivot");
        }
        const Complex fact = dl_[i] / dd_[i];
        dl_[i] = fact;
        dd_[i + 1] -= fact * du_[i];
        if (i + 2 < m_) du2_[i] = 0.0;
      } else {
        swap_[i] = true;
        const Complex fact = dd_[i] / dl_[i];
        dd_[i] = dl_[i];
        dl_[i] = fact;
        const Complex tmp = du_[i];
        du_[i] = dd_[i + 1];
        dd_[i + 1] = tmp - fact * dd_[i + 1];
        if (i + 2 < m_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
      }
    }
    if (m_ > 0 && std::abs(dd_[m_ - 1]) == 0.0) {
      throw ResolventIllConditioned("singular shifted tridiagonal pivot");
    }
  }

  void solve_in_place(Eigen::Ref<Eigen::VectorXcd> b) const {
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      if (!swap_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const Complex tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl_[i] * b[i];
      }
    }
    if (m_ == 0) return;
    b[m_ - 1] /= dd_[m_ - 1];
    if (m_ > 1) b[m_ - 2] = (b[m_ - 2] - du_[m_ - 2] * b[m_ - 1]) / dd_[m_ - 2];
    for (Eigen::Index i = m_ - 3; i >= 0; --i) {
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / dd_[i];
    }
  }

 private:
  Eigen::Index m_;
  Eigen::VectorXcd dl_, dd_, du_, du2_;
  std::vector<bool> swap_;
};

}  // namespace detail

inline Eigen::MatrixXcd helffer_sjostrand_chi(
    const Eigen::MatrixXcd& a, const ChiProfile& chi, int k,
    const HelfferSjostrandOptions& opts = {}) {
  require_hermitian(a);
  chi.validate();
  if (k < 1) throw ConfigError("scale k must be a positive integer");
  const Eigen::Index m = a.rows();
  if (m == 0) return a;
  if (m > opts.max_size) {
    throw CapacityExceeded("matrix size " + std::to_string(m) +
                           " exceeds functional-calculus cap " +
                           std::to_string(opts.max_size));
  }

  Eigen::Tridiagonalization<Eigen::MatrixXcd> tri(a);
  const Eigen::MatrixXcd q = tri.matrixQ();
  const Eigen::VectorXd diag = tri.diagonal();
  const Eigen::VectorXd sub = tri.subDiagonal();

  const int order = opts.order;
  const double x_lo = static_cast<double>(k) * chi.t_min();
  const double x_hi = static_cast<double>(k) * chi.t_max();
  const double height = opts.height_factor * static_cast<double>(k) *
                        chi.radius;

  const auto integrate = [&](int points) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m, m);
    Eigen::MatrixXcd resolvent(m, m);
    const QuadratureRule base = gauss_legendre(points);
    std::vector<double> xs, xw, ys, yw;
    for (int p = 0; p < opts.x_panels; ++p) {
      const double lo = x_lo + (x_hi - x_lo) * p / opts.x_panels;
      const double hi = x_lo + (x_hi - x_lo) * (p + 1) / opts.x_panels;
      for (int i = 0; i < points; ++i) {
        xs.push_back(0.5 * (hi + lo) + 0.5 * (hi - lo) * base.nodes[i]);
        xw.push_back(0.5 * (hi - lo) * base.weights[i]);
      }
    }
    for (int p = 0; p < opts.y_panels; ++p) {
      const double lo = height * p / opts.y_panels;
      const double hi = height * (p + 1) / opts.y_panels;
      for (int i = 0; i < points; ++i) {
        ys.push_back(0.5 * (hi + lo) + 0.5 * (hi - lo) * base.nodes[i]);
        yw.push_back(0.5 * (hi - lo) * base.weights[i]);
      }
    }
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const double x = xs[ix];
      // Taylor coefficients of f(x) = chi(x / k) at x: chi's t-coefficients
      // scaled by k^{-r}.
      const std::vector<double> ct = chi.taylor(x / k, order + 1);
      std::vector<double> cx(ct.size());
      double kpow = 1.0;
      for (std::size_t r = 0; r < ct.size(); ++r) {
        cx[r] = ct[r] / kpow;
        kpow *= static_cast<double>(k);
      }
      for (std::size_t iy = 0; iy < ys.size(); ++iy) {
        const double y = ys[iy];
        const double sarg = 2.0 * (height - y) / height;
        const double sigma = detail::bump_step(sarg);
        const double sigma_prime =
            detail::bump_step_deriv(sarg) * (-2.0 / height);
        Complex iy_pow(1.0, 0.0);
        Complex taylor_sum(0.0, 0.0);
        const Complex iy1(0.0, y);
        for (int r = 0; r <= order; ++r) {
          taylor_sum += cx[static_cast<std::size_t>(r)] * iy_pow;
          if (r < order) iy_pow *= iy1;
        }
        // dbar f_tilde = (1/2)[sigma (N+1) c_{N+1} (iy)^N
        //                      + i sigma' sum_{r<=N} c_r (iy)^r]
        const Complex dbar =
            0.5 * (sigma * (order + 1) *
                       cx[static_cast<std::size_t>(order + 1)] * iy_pow +
                   Complex(0.0, 1.0) * sigma_prime * taylor_sum);
        if (dbar == Complex(0.0, 0.0)) continue;
        const Complex z(x, y);
        detail::ShiftedTridiagonalSolver solver(diag, sub, z);
        resolvent.setIdentity();
        for (Eigen::Index col = 0; col < m; ++col) {
          solver.solve_in_place(resolvent.col(col));
        }
        s.noalias() += (xw[ix] * yw[iy] * dbar) * resolvent;
      }
    }
    return s;
  };

  // Frobenius norms grow with the matrix size; gate per unit of it.
  const double gate = opts.tolerance * (1.0 + chi.sup_value()) *
                      std::sqrt(static_cast<double>(m));
  int points = opts.points;
  Eigen::MatrixXcd s = integrate(points);
  bool converged = false;
  for (int ref = 0; ref < opts.max_refinements; ++ref) {
    const int finer = points + 8;
    const Eigen::MatrixXcd s2 = integrate(finer);
    const double delta = (s2 - s).norm();
    s = s2;
    points = finer;
    if (delta <= gate) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ResolventIllConditioned(
        "plane integral failed to converge; profile too sharp for the "
        "resolvent grid");
  }

  const Eigen::MatrixXcd st = (-1.0 / kPi) * (s + s.adjoint());
  return q * st * q.adjoint();
}

}  // namespace speclab
