#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "speclab/geometry.hpp"
#include "support/oracles.hpp"

using namespace speclab;

namespace {

RealVec real_point(std::initializer_list<double> v) {
  RealVec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

DefiningFunction normalized_ball(int n) {
  const DomainSpec ball = Ball(n);
  RealVec anchor = RealVec::Zero(2 * n);
  anchor[0] = 1.0;
  return normalize_defining_function(model_defining_function(ball), anchor);
}

}  // namespace

TEST_CASE("hermitian pairing convention matches the real metric",
          "[geometry]") {
  // <d/dz_j | d/dz_k> = delta_jk / 2 once d/dz = (d/dx - i d/dy)/2 is paired
  // in the Euclidean metric; equivalently Re<U|V> = (1/2) <u, v>_R for the
  // interleaved embeddings.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Vector3cd u, v;
    for (int j = 0; j < 3; ++j) {
      u[j] = Complex(gauss(rng), gauss(rng));
      v[j] = Complex(gauss(rng), gauss(rng));
    }
    const Complex pairing = 0.5 * u.dot(v);  // conjugates the second slot
    RealVec ur(6), vr(6);
    for (int j = 0; j < 3; ++j) {
      ur[2 * j] = u[j].real();
      ur[2 * j + 1] = u[j].imag();
      vr[2 * j] = v[j].real();
      vr[2 * j + 1] = v[j].imag();
    }
    REQUIRE(pairing.real() == Catch::Approx(0.5 * ur.dot(vr)).margin(1e-12));
  }
}

TEST_CASE("defining function normalization on the ball", "[geometry]") {
  const DefiningFunction rho = normalized_ball(2);
  const RealVec x = real_point({1.0, 0.0, 0.0, 0.0});

  SECTION("boundary value and unit gradient") {
    REQUIRE(rho.value(x) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(rho.gradient(x).norm() == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("normalized form is (|z|^2 - 1) / (2 |z|)") {
    const RealVec z = real_point({0.5, 0.0, 0.0, 0.0});
    REQUIRE(rho.value(z) == Catch::Approx(-0.75).margin(1e-12));
    const RealVec z9 = real_point({0.9, 0.0, 0.0, 0.0});
    REQUIRE(rho.value(z9) ==
            Catch::Approx((0.81 - 1.0) / 1.8).margin(1e-12));
  }
  SECTION("negative inside, zero on the boundary, for raw and normalized") {
    const DefiningFunction raw = model_defining_function(Ball(2));
    const RealVec inside = real_point({0.3, 0.2, -0.1, 0.4});
    REQUIRE(raw.value(inside) < 0.0);
    REQUIRE(rho.value(inside) < 0.0);
    const RealVec bd = real_point({0.6, 0.0, 0.0, 0.8});
    REQUIRE(std::abs(raw.value(bd)) <= 1e-12);
    REQUIRE(std::abs(rho.value(bd)) <= 1e-12);
  }
  SECTION("gradient agrees with a finite-difference oracle") {
    const RealVec bd = real_point({0.6, 0.0, 0.0, 0.8});
    const RealVec fd = oracles::fd_gradient(
        [&](const RealVec& p) { return rho.value(p); }, bd);
    REQUIRE((rho.gradient(bd) - fd).norm() < 1e-8);
  }
}

TEST_CASE("normalization on the Hermitian ellipsoid", "[geometry]") {
  const DomainSpec dom = HermitianEllipsoid(2, {1.0, 4.0});
  const RealVec x = real_point({1.0, 0.0, 0.0, 0.0});
  const DefiningFunction raw = model_defining_function(dom);
  REQUIRE(raw.gradient(x).norm() == Catch::Approx(2.0).margin(1e-12));

  const DefiningFunction rho = normalize_defining_function(raw, x);
  REQUIRE(rho.value(x) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(rho.gradient(x).norm() == Catch::Approx(1.0).margin(1e-12));
  const RealVec fd = oracles::fd_gradient(
      [&](const RealVec& p) { return rho.value(p); }, x);
  REQUIRE((rho.gradient(x) - fd).norm() < 1e-8);
}

TEST_CASE("normalization is projective and guards critical points",
          "[geometry]") {
  const DomainSpec dom = Ball(2);
  const RealVec x = real_point({0.0, 0.0, 1.0, 0.0});

  DefiningFunction scaled = model_defining_function(dom);
  auto base_value = scaled.value;
  auto base_grad = scaled.gradient;
  auto base_rh = scaled.real_hessian;
  scaled.value = [base_value](const RealVec& p) { return 3.7 * base_value(p); };
  scaled.gradient = [base_grad](const RealVec& p) {
    return RealVec(3.7 * base_grad(p));
  };
  scaled.real_hessian = [base_rh](const RealVec& p) {
    return Eigen::MatrixXd(3.7 * base_rh(p));
  };

  const DefiningFunction a = normalize_defining_function(
      model_defining_function(dom), x);
  const DefiningFunction b = normalize_defining_function(scaled, x);
  for (const RealVec& p :
       {x, real_point({0.6, 0.0, 0.8, 0.0}), real_point({0.0, 1.0, 0.0, 0.0})}) {
    REQUIRE(std::abs(a.value(p) - b.value(p)) < 1e-10);
    REQUIRE((a.gradient(p) - b.gradient(p)).norm() < 1e-10);
  }

  REQUIRE_THROWS_AS(
      normalize_defining_function(model_defining_function(dom),
                                  RealVec::Zero(4)),
      DegenerateGradient);
}

TEST_CASE("contact form on the circle and sphere", "[geometry]") {
  SECTION("n=1, z=1: omega_0 = dy") {
    const DefiningFunction rho = normalized_ball(1);
    const RealVec x = real_point({1.0, 0.0});
    const RealVec w = omega0_at(rho, x);
    REQUIRE(w[0] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(w[1] == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("normalization identity omega_0(J grad rho) = 1") {
    const DefiningFunction rho = normalized_ball(2);
    for (const RealVec& x :
         {real_point({0.0, 0.0, 0.0, 1.0}), real_point({0.6, 0.0, 0.0, 0.8}),
          real_point({0.5, 0.5, 0.5, 0.5})}) {
      const RealVec w = omega0_at(rho, x);
      REQUIRE(w.dot(reeb_direction(rho, x)) ==
              Catch::Approx(1.0).margin(1e-10));
    }
  }
  SECTION("omega_0 annihilates the complex tangent space") {
    const DefiningFunction rho = normalized_ball(2);
    const RealVec x = real_point({1.0, 0.0, 0.0, 0.0});
    const RealVec w = omega0_at(rho, x);
    // At e_1 the contact distribution is the z_2 plane.
    REQUIRE(std::abs(w[2]) < 1e-10);
    REQUIRE(std::abs(w[3]) < 1e-10);
  }
  SECTION("ellipsoid components match the finite-difference oracle") {
    const DomainSpec dom = HermitianEllipsoid(2, {1.0, 4.0});
    const RealVec x = real_point({0.0, 0.0, 0.5, 0.0});
    const DefiningFunction rho =
        normalize_defining_function(model_defining_function(dom), x);
    const RealVec w = omega0_at(rho, x);
    // omega_0(v) = -d rho(J v), checked column by column against central
    // differences of the normalized value.
    for (Eigen::Index i = 0; i < 4; ++i) {
      RealVec v = RealVec::Zero(4);
      v[i] = 1.0;
      const RealVec jv = [&] {
        RealVec out = RealVec::Zero(4);
        for (Eigen::Index j = 0; j + 1 < 4; j += 2) {
          out[j] = -v[j + 1];
          out[j + 1] = v[j];
        }
        return out;
      }();
      const double h = 1e-6;
      const double fd =
          -(rho.value(x + h * jv) - rho.value(x - h * jv)) / (2.0 * h);
      REQUIRE(w[i] == Catch::Approx(fd).margin(1e-8));
    }
  }
  SECTION("off-boundary requests are rejected") {
    const DefiningFunction rho = normalized_ball(2);
    REQUIRE_THROWS_AS(omega0_at(rho, real_point({0.5, 0.0, 0.0, 0.0})),
                      NotOnBoundary);
  }
}

TEST_CASE("Levi spectrum on model domains", "[geometry]") {
  SECTION("ball n=2: eigenvalue 1, determinant 1") {
    const DefiningFunction rho = normalized_ball(2);
    for (const RealVec& x :
         {real_point({1.0, 0.0, 0.0, 0.0}), real_point({0.6, 0.0, 0.0, 0.8}),
          real_point({0.5, -0.5, 0.5, 0.5})}) {
      const LeviSpectrum lev = levi_spectrum(rho, x);
      REQUIRE(lev.eigenvalues.size() == 1);
      REQUIRE(lev.eigenvalues[0] == Catch::Approx(1.0).margin(1e-9));
      REQUIRE(lev.det_levi == Catch::Approx(1.0).margin(1e-9));
      REQUIRE(lev.all_positive);
    }
  }
  SECTION("ball n=3: eigenvalues (1,1)") {
    const DefiningFunction rho = normalized_ball(3);
    const LeviSpectrum lev =
        levi_spectrum(rho, real_point({0.0, 0.6, 0.0, 0.0, 0.8, 0.0}));
    REQUIRE(lev.eigenvalues.size() == 2);
    REQUIRE(lev.eigenvalues[0] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(lev.eigenvalues[1] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(lev.det_levi == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("ellipsoid a=(1,4) at e_1: determinant 4") {
    const DomainSpec dom = HermitianEllipsoid(2, {1.0, 4.0});
    const RealVec x = real_point({1.0, 0.0, 0.0, 0.0});
    const DefiningFunction rho =
        normalize_defining_function(model_defining_function(dom), x);
    const LeviSpectrum lev = levi_spectrum(rho, x);
    REQUIRE(lev.det_levi == Catch::Approx(4.0).margin(1e-8));

    // Independent route: finite-difference real Hessian -> complex Hessian,
    // paired on the frame returned by the library.
    const Eigen::MatrixXcd h = oracles::complex_hessian_from_real(
        oracles::fd_real_hessian(
            [&](const RealVec& p) { return rho.value(p); }, x));
    const Eigen::MatrixXcd m =
        lev.frame * h * lev.frame.adjoint();
    REQUIRE(std::abs(m(0, 0).real() - lev.eigenvalues[0]) < 1e-5);
  }
  SECTION("frame rows are unit for the hermitian pairing") {
    const DefiningFunction rho = normalized_ball(3);
    const LeviSpectrum lev =
        levi_spectrum(rho, real_point({1.0, 0.0, 0.0, 0.0, 0.0, 0.0}));
    for (Eigen::Index i = 0; i < lev.frame.rows(); ++i) {
      REQUIRE(0.5 * lev.frame.row(i).squaredNorm() ==
              Catch::Approx(1.0).margin(1e-12));
    }
  }
  SECTION("eigenvalues are invariant under a unitary frame rotation") {
    const DomainSpec dom = HermitianEllipsoid(3, {1.0, 2.0, 3.0});
    const RealVec x = real_point({1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    const DefiningFunction rho =
        normalize_defining_function(model_defining_function(dom), x);
    const LeviSpectrum lev = levi_spectrum(rho, x);
    REQUIRE(lev.eigenvalues.size() == 2);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    const Eigen::MatrixXcd q =
        Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
    const Eigen::MatrixXcd rotated = q * lev.frame;
    const Eigen::MatrixXcd levi_rotated =
        rotated * rho.complex_hessian(x) * rotated.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(levi_rotated);
    for (Eigen::Index i = 0; i < 2; ++i) {
      REQUIRE(es.eigenvalues()[i] ==
              Catch::Approx(lev.eigenvalues[static_cast<std::size_t>(i)])
                  .margin(1e-9));
    }
  }
  SECTION("n=1 has an empty spectrum and determinant 1") {
    const DefiningFunction rho = normalized_ball(1);
    const LeviSpectrum lev = levi_spectrum(rho, real_point({1.0, 0.0}));
    REQUIRE(lev.eigenvalues.empty());
    REQUIRE(lev.det_levi == 1.0);
  }
  SECTION("interior points are rejected") {
    const DefiningFunction rho = normalized_ball(2);
    REQUIRE_THROWS_AS(levi_spectrum(rho, real_point({0.5, 0.0, 0.0, 0.0})),
                      NotOnBoundary);
  }
}

TEST_CASE("Levi form conformal covariance on the complex tangent space",
          "[geometry]") {
  // For a positive factor f, the raw Levi matrices of f*rho and rho agree up
  // to f(x) when restricted to T^{1,0}X, because rho and its holomorphic
  // gradient components vanish there only along the boundary directions.
  const DefiningFunction raw = model_defining_function(Ball(2));
  const RealVec x = real_point({0.6, 0.0, 0.0, 0.8});
  const Complex z1(0.6, 0.0), z2(0.0, 0.8);

  const double fx = 1.0 + 0.3 * x[0];
  // Complex Hessian of f*rho with f = 1 + 0.3 x_1, rho = |z|^2 - 1:
  //   f H + (df/dz_j)(drho/dzbar_k) + (drho/dz_j)(df/dzbar_k).
  Eigen::MatrixXcd h_scaled = fx * raw.complex_hessian(x);
  const Complex df_dz1(0.15, 0.0);
  const Complex drho_dz[2] = {std::conj(z1), std::conj(z2)};
  const Complex drho_dzbar[2] = {z1, z2};
  for (int k = 0; k < 2; ++k) h_scaled(0, k) += df_dz1 * drho_dzbar[k];
  for (int j = 0; j < 2; ++j) h_scaled(j, 0) += drho_dz[j] * std::conj(df_dz1);

  // Frame for T^{1,0}X at x: orthogonal to (drho/dz_1, drho/dz_2) = conj(z).
  Eigen::Vector2cd u;
  u << -std::conj(z2), std::conj(z1);
  u *= std::sqrt(2.0) / u.norm();

  // Levi pairing L(u, ubar): u enters the holomorphic slot unconjugated.
  const Complex levi_raw =
      u.transpose() * raw.complex_hessian(x) * u.conjugate();
  const Complex levi_scaled = u.transpose() * h_scaled * u.conjugate();
  REQUIRE(std::abs(levi_scaled - fx * levi_raw) < 1e-8);
}

TEST_CASE("Reeb-like decomposition", "[geometry]") {
  const DefiningFunction rho = normalized_ball(2);

  SECTION("unweighted rotation gives alpha = 1, Z = 0") {
    for (const RealVec& x :
         {real_point({1.0, 0.0, 0.0, 0.0}), real_point({0.6, 0.0, 0.0, 0.8}),
          real_point({0.5, 0.5, -0.5, 0.5})}) {
      RealVec field(4);
      field[0] = -x[1];
      field[1] = x[0];
      field[2] = -x[3];
      field[3] = x[2];
      const ReebDecomposition dec = decompose_reeb_like(rho, x, field);
      REQUIRE(dec.alpha == Catch::Approx(1.0).margin(1e-10));
      REQUIRE(dec.cr_component.norm() < 1e-10);
    }
  }
  SECTION("weighted rotation (1,2): alpha = |x_1|^2 + 2 |x_2|^2") {
    for (const RealVec& x :
         {real_point({1.0, 0.0, 0.0, 0.0}), real_point({0.0, 0.0, 0.0, 1.0}),
          real_point({0.6, 0.0, 0.0, 0.8})}) {
      RealVec field(4);
      field[0] = -1.0 * x[1];
      field[1] = 1.0 * x[0];
      field[2] = -2.0 * x[3];
      field[3] = 2.0 * x[2];
      const ReebDecomposition dec = decompose_reeb_like(rho, x, field);
      const double expected = (x[0] * x[0] + x[1] * x[1]) +
                              2.0 * (x[2] * x[2] + x[3] * x[3]);
      REQUIRE(dec.alpha == Catch::Approx(expected).margin(1e-10));
      REQUIRE(dec.alpha >= 1.0 - 1e-12);
      REQUIRE(dec.alpha <= 2.0 + 1e-12);
    }
  }
  SECTION("tangential perturbation lands in the CR component") {
    const RealVec x = real_point({1.0, 0.0, 0.0, 0.0});
    RealVec field = reeb_direction(rho, x);
    field[2] += 0.25;  // holomorphic tangent direction at e_1
    const ReebDecomposition dec = decompose_reeb_like(rho, x, field);
    REQUIRE(dec.alpha == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(dec.cr_component[2] == Catch::Approx(0.25).margin(1e-10));
    REQUIRE((dec.cr_component - real_point({0.0, 0.0, 0.25, 0.0})).norm() <
            1e-10);
  }
  SECTION("round trip on alpha J grad rho + Z") {
    const RealVec x = real_point({0.6, 0.0, 0.0, 0.8});
    RealVec z_dir(4);
    // A vector in the contact plane at x: orthogonal to grad and J grad.
    z_dir[0] = 0.0;
    z_dir[1] = 0.8;
    z_dir[2] = 0.6;
    z_dir[3] = 0.0;
    const RealVec g = rho.gradient(x);
    REQUIRE(std::abs(g.dot(z_dir)) < 1e-12);
    REQUIRE(std::abs(omega0_at(rho, x).dot(z_dir)) < 1e-12);
    const RealVec field = 0.7 * reeb_direction(rho, x) + 0.4 * z_dir;
    const ReebDecomposition dec = decompose_reeb_like(rho, x, field);
    REQUIRE(dec.alpha == Catch::Approx(0.7).margin(1e-10));
    REQUIRE((dec.cr_component - 0.4 * z_dir).norm() < 1e-10);
    // Z flags: annihilated by d rho and omega_0.
    REQUIRE(std::abs(g.dot(dec.cr_component)) < 1e-10);
    REQUIRE(std::abs(omega0_at(rho, x).dot(dec.cr_component)) < 1e-10);
  }
  SECTION("non-tangent and non-positive fields are rejected") {
    const RealVec x = real_point({1.0, 0.0, 0.0, 0.0});
    REQUIRE_THROWS_AS(decompose_reeb_like(rho, x, rho.gradient(x)),
                      NotTangent);
    REQUIRE_THROWS_AS(
        decompose_reeb_like(rho, x, RealVec(-reeb_direction(rho, x))),
        NonPositiveAlpha);
  }
}
