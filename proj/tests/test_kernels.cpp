#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "speclab/kernels.hpp"
#include "speclab/spectral.hpp"
#include "support/oracles.hpp"

using namespace speclab;

namespace {

std::vector<Complex> random_ball_point(std::mt19937_64& rng, int n,
                                       double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.3, radius);
  std::vector<Complex> z(static_cast<std::size_t>(n));
  double norm2 = 0.0;
  for (auto& c : z) {
    c = Complex(gauss(rng), gauss(rng));
    norm2 += std::norm(c);
  }
  const double scale = unif(rng) / std::sqrt(norm2);
  for (auto& c : z) c *= scale;
  return z;
}

// Companion point with per-coordinate factors of modulus near one and small
// argument. Keeping arg(z_j conj(w_j)) small keeps the term sum far away from
// the cancellation guard: a generic complex pair at large k has a true kernel
// value exponentially below its largest term, which double precision cannot
// represent and the evaluator rightly refuses.
std::vector<Complex> mild_companion(std::mt19937_64& rng,
                                    const std::vector<Complex>& z) {
  std::uniform_real_distribution<double> mag(0.9, 1.0);
  std::uniform_real_distribution<double> arg(-0.03, 0.03);
  std::vector<Complex> w(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    w[j] = z[j] * std::polar(mag(rng), arg(rng));
  }
  return w;
}

Complex pair_dot(const std::vector<Complex>& z, const std::vector<Complex>& w) {
  Complex s(0.0, 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

}  // namespace

TEST_CASE("kernel values match the closed-form degree sums", "[kernels]") {
  const DomainSpec ball = Ball(2);
  const RotationGenerator gen{{1.0, 1.0}};
  const ChiProfile chi(1.5, 0.5);
  const double k = 100.0;
  const int d_max = 210;  // support of chi(d/k) ends at d = 200

  SECTION("interior diagonal on and inside the sphere") {
    // On the diagonal the layer sum collapses to <z,z>^d = |z|^{2d}.
    for (double r2 : {1.0, 0.81, 0.49}) {
      const double x = std::sqrt(r2 * 0.36), y = std::sqrt(r2 * 0.64);
      const std::vector<Complex> z{Complex(x, 0.0), Complex(0.0, y)};
      const KernelSample s = kernel_eval_streaming(ball, gen, chi, k, z, z);
      const Complex oracle =
          oracles::ball_kernel_degree_sum(2, chi, k, Complex(r2, 0.0), d_max);
      REQUIRE(s.value.imag() == 0.0);
      REQUIRE(s.value.real() == Catch::Approx(oracle.real()).epsilon(1e-10));
      REQUIRE(s.terms_used > 0);
      REQUIRE(std::isfinite(s.max_term_log));
    }
  }

  SECTION("interior off-diagonal with complex phases") {
    const std::vector<Complex> z{Complex(0.6, 0.0), Complex(0.0, 0.8)};
    const std::vector<Complex> w{Complex(0.55, 0.1), Complex(0.05, 0.75)};
    const Complex dot = pair_dot(z, w);
    const KernelSample s = kernel_eval_streaming(ball, gen, chi, k, z, w);
    const Complex oracle =
        oracles::ball_kernel_degree_sum(2, chi, k, dot, d_max);
    REQUIRE(std::abs(s.value.imag()) > 0.0);
    REQUIRE(std::abs(s.value - oracle) <= 1e-10 * std::abs(oracle));
  }

  SECTION("materialized and streaming evaluations agree") {
    const SpectralProjectorRep proj = build_projector(ball, gen, chi, k);
    const std::vector<Complex> z{Complex(0.5, 0.1), Complex(-0.2, 0.6)};
    const std::vector<Complex> w{Complex(0.45, 0.05), Complex(-0.25, 0.55)};
    const KernelSample a = kernel_eval(proj, z, w);
    const KernelSample b = kernel_eval_streaming(ball, gen, chi, k, z, w);
    REQUIRE(std::abs(a.value - b.value) <= 1e-13 * std::abs(b.value));
    REQUIRE(a.terms_used == b.terms_used);
  }

  SECTION("boundary kernel matches the sphere layer sums") {
    const std::vector<Complex> z{Complex(0.6, 0.0), Complex(0.0, 0.8)};
    const std::vector<Complex> w{z[0] * std::polar(1.0, 0.1),
                                 z[1] * std::polar(1.0, -0.08)};
    const Complex dot = pair_dot(z, w);
    const KernelSample diag =
        kernel_eval_streaming(ball, gen, chi, k, z, z, /*boundary=*/true);
    const KernelSample off =
        kernel_eval_streaming(ball, gen, chi, k, z, w, /*boundary=*/true);
    const Complex diag_oracle =
        oracles::sphere_kernel_degree_sum(2, chi, k, Complex(1.0, 0.0), d_max);
    const Complex off_oracle =
        oracles::sphere_kernel_degree_sum(2, chi, k, dot, d_max);
    REQUIRE(diag.value.real() ==
            Catch::Approx(diag_oracle.real()).epsilon(1e-10));
    REQUIRE(std::abs(off.value - off_oracle) <= 1e-10 * std::abs(off_oracle));
  }

  SECTION("weighted generator restricted to one axis") {
    // With w_2 = 0 only alpha = (m, 0) contributes, so the value reduces to a
    // one-dimensional sum independent of the second weight.
    const RotationGenerator weighted{{1.0, 2.0}};
    const std::vector<Complex> z{Complex(0.9, 0.0), Complex(0.0, 0.0)};
    const KernelSample s = kernel_eval_streaming(ball, weighted, chi, k, z, z);
    double direct = 0.0;
    for (int m = 0; m <= d_max; ++m) {
      const double wt = chi(static_cast<double>(m) / k);
      if (wt == 0.0) continue;
      // ||z_1^m||^2 = pi^2 m! / (m+2)! on the unit ball in dimension two.
      direct += wt * (m + 1.0) * (m + 2.0) / (kPi * kPi) * std::pow(0.81, m);
    }
    REQUIRE(s.value.real() == Catch::Approx(direct).epsilon(1e-10));
    const KernelSample unweighted =
        kernel_eval_streaming(ball, gen, chi, k, z, z);
    REQUIRE(s.value.real() == unweighted.value.real());
  }
}

TEST_CASE("kernel vanishes exactly when a support coordinate is missing",
          "[kernels]") {
  const DomainSpec ball = Ball(2);
  const RotationGenerator gen{{1.0, 1.0}};
  const ChiProfile chi(1.5, 0.5);

  SECTION("orthogonal coordinate axes give exactly zero") {
    const std::vector<Complex> z{Complex(1.0, 0.0), Complex(0.0, 0.0)};
    const std::vector<Complex> w{Complex(0.0, 0.0), Complex(1.0, 0.0)};
    const KernelSample s = kernel_eval_streaming(ball, gen, chi, 50.0, z, w);
    REQUIRE(s.value == Complex(0.0, 0.0));
    REQUIRE(s.terms_used == 0);
  }
  SECTION("both points at the origin give exactly zero") {
    const std::vector<Complex> zero{Complex(0.0, 0.0), Complex(0.0, 0.0)};
    const KernelSample s =
        kernel_eval_streaming(ball, gen, chi, 50.0, zero, zero);
    REQUIRE(s.value == Complex(0.0, 0.0));
    REQUIRE(s.terms_used == 0);
  }
  SECTION("materialized path short-circuits the same way") {
    const SpectralProjectorRep proj = build_projector(ball, gen, chi, 20.0);
    const std::vector<Complex> z{Complex(1.0, 0.0), Complex(0.0, 0.0)};
    const std::vector<Complex> w{Complex(0.0, 0.0), Complex(1.0, 0.0)};
    const KernelSample s = kernel_eval(proj, z, w);
    REQUIRE(s.value == Complex(0.0, 0.0));
  }
}

TEST_CASE("kernel symmetry and positivity invariants", "[kernels]") {
  const DomainSpec ball = Ball(2);
  const RotationGenerator gen{{1.0, 2.0}};
  const ChiProfile chi(1.5, 0.5);
  const double k = 60.0;
  std::mt19937_64 rng(20260819ull);

  SECTION("Hermitian symmetry: K(z, w) = conj(K(w, z))") {
    for (int trial = 0; trial < 8; ++trial) {
      const auto z = random_ball_point(rng, 2, 0.95);
      const auto w = mild_companion(rng, z);
      const KernelSample zw = kernel_eval_streaming(ball, gen, chi, k, z, w);
      const KernelSample wz = kernel_eval_streaming(ball, gen, chi, k, w, z);
      const double scale = std::max(std::abs(zw.value), 1e-300);
      REQUIRE(std::abs(zw.value - std::conj(wz.value)) <= 1e-12 * scale);
    }
  }

  SECTION("diagonal values are exactly real and nonnegative") {
    for (int trial = 0; trial < 8; ++trial) {
      const auto z = random_ball_point(rng, 2, 0.95);
      const KernelSample s = kernel_eval_streaming(ball, gen, chi, k, z, z);
      REQUIRE(s.value.imag() == 0.0);
      REQUIRE(s.value.real() >= 0.0);
    }
  }

  SECTION("Cauchy-Schwarz bound on near-diagonal pairs") {
    for (int trial = 0; trial < 8; ++trial) {
      const auto z = random_ball_point(rng, 2, 0.95);
      const auto w = mild_companion(rng, z);
      const double kzz =
          kernel_eval_streaming(ball, gen, chi, k, z, z).value.real();
      const double kww =
          kernel_eval_streaming(ball, gen, chi, k, w, w).value.real();
      const double kzw =
          std::abs(kernel_eval_streaming(ball, gen, chi, k, z, w).value);
      REQUIRE(kzw * kzw <= kzz * kww + 1e-10 * (1.0 + kzz) * (1.0 + kww));
    }
  }

  SECTION("Cauchy-Schwarz bound on a masked pair") {
    // With z supported on one axis the sum is one-dimensional, so any second
    // point is admissible without conditioning concerns.
    const std::vector<Complex> z{Complex(0.9, 0.0), Complex(0.0, 0.0)};
    const std::vector<Complex> w{Complex(0.4, 0.5), Complex(0.3, -0.6)};
    const double kzz =
        kernel_eval_streaming(ball, gen, chi, k, z, z).value.real();
    const double kww =
        kernel_eval_streaming(ball, gen, chi, k, w, w).value.real();
    const double kzw =
        std::abs(kernel_eval_streaming(ball, gen, chi, k, z, w).value);
    REQUIRE(kzw * kzw <= kzz * kww + 1e-10 * (1.0 + kzz) * (1.0 + kww));
  }

  SECTION("unitary rotation of both arguments leaves the kernel unchanged") {
    // Valid for equal weights: the index sum is a function of <z, w> alone.
    const RotationGenerator iso{{1.0, 1.0}};
    const double c = std::cos(0.7), s = std::sin(0.7);
    const Complex phase = std::polar(1.0, 0.3);
    const auto rotate = [&](const std::vector<Complex>& p) {
      return std::vector<Complex>{phase * (c * p[0] - s * p[1]),
                                  phase * (s * p[0] + c * p[1])};
    };
    for (int trial = 0; trial < 5; ++trial) {
      const auto z = random_ball_point(rng, 2, 0.95);
      const auto w = mild_companion(rng, z);
      const Complex a = kernel_eval_streaming(ball, iso, chi, k, z, w).value;
      const Complex b =
          kernel_eval_streaming(ball, iso, chi, k, rotate(z), rotate(w)).value;
      const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
      REQUIRE(std::abs(a - b) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("scaled summation detects catastrophic cancellation", "[kernels]") {
  SECTION("two equal terms with opposite phase trip the guard") {
    detail::ScaledSum sum;
    sum.add(0.0, 0.0);
    sum.add(0.0, kPi);
    // The residual is sin(pi) in double precision, about 1.2e-16, which sits
    // more than e^36 below the largest term.
    REQUIRE(sum.terms() == 2);
    REQUIRE(sum.max_log() == 0.0);
    REQUIRE(std::abs(sum.value()) < 1e-15);
    REQUIRE_THROWS_AS(sum.check_stable(), UnstableSummation);
  }
  SECTION("benign sums pass the guard") {
    detail::ScaledSum empty;
    REQUIRE(empty.value() == Complex(0.0, 0.0));
    REQUIRE_NOTHROW(empty.check_stable());

    detail::ScaledSum tiny_then_large;
    tiny_then_large.add(-100.0, 0.0);
    tiny_then_large.add(0.0, 0.0);
    REQUIRE(tiny_then_large.value().real() ==
            Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE_NOTHROW(tiny_then_large.check_stable());

    detail::ScaledSum large_then_tiny;
    large_then_tiny.add(200.0, 0.5);
    large_then_tiny.add(-200.0, 1.0);
    REQUIRE_NOTHROW(large_then_tiny.check_stable());
    REQUIRE(std::abs(large_then_tiny.value()) ==
            Catch::Approx(std::exp(200.0)).epsilon(1e-12));
  }
  SECTION("an all-positive high-frequency diagonal does not trip the guard") {
    const DomainSpec ball = Ball(2);
    const RotationGenerator gen{{1.0, 1.0}};
    const ChiProfile chi(1.5, 0.5);
    const std::vector<Complex> z{Complex(0.6, 0.0), Complex(0.8, 0.0)};
    REQUIRE_NOTHROW(
        kernel_eval_streaming(ball, gen, chi, 400.0, z, z, /*boundary=*/true));
  }
}

TEST_CASE("ladder scans produce sorted, reproducible tables", "[kernels]") {
  ScanSetup setup;
  setup.domain = Ball(2);
  setup.generator = RotationGenerator{{1.0, 1.0}};
  setup.profile = ChiProfile(1.5, 0.5);
  const std::vector<double> ladder{10.0, 20.0, 40.0};

  const std::vector<NamedPoint> points{
      {"pt_b", {Complex(0.6, 0.0), Complex(0.0, 0.8)}},
      {"pt_a", {Complex(0.5, 0.0), Complex(0.0, 0.0)}},
      {"origin", {Complex(0.0, 0.0), Complex(0.0, 0.0)}},
  };

  SECTION("rows are sorted by point id then k") {
    const ScanTable table = diagonal_scan(setup, points, ladder);
    REQUIRE(table.rows.size() == 9);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      const ScanRow& prev = table.rows[i - 1];
      const ScanRow& cur = table.rows[i];
      const bool ordered = prev.point_id < cur.point_id ||
                           (prev.point_id == cur.point_id && prev.k < cur.k);
      REQUIRE(ordered);
    }
    REQUIRE(table.point_ids() ==
            std::vector<std::string>{"origin", "pt_a", "pt_b"});
    for (const ScanRow& r : table.rows_for("origin")) {
      REQUIRE(r.value == Complex(0.0, 0.0));
      REQUIRE(r.terms_used == 0);
    }
    for (const ScanRow& r : table.rows_for("pt_b")) {
      REQUIRE(r.terms_used > 0);
      REQUIRE(std::isfinite(r.max_term_log));
      REQUIRE(r.value.real() > 0.0);
    }
  }

  SECTION("csv layout: header plus one line per row") {
    const ScanTable table = diagonal_scan(setup, points, ladder);
    const std::string csv = table.to_csv();
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "point_id,k,re_value,im_value,terms_used");
    std::size_t data_lines = 0;
    while (std::getline(in, line)) {
      ++data_lines;
      REQUIRE(std::count(line.begin(), line.end(), ',') == 4);
    }
    REQUIRE(data_lines == table.rows.size());
  }

  SECTION("dat output is two whitespace-separated columns per rung") {
    const ScanTable table = diagonal_scan(setup, points, ladder);
    const std::string dat = table.dat_for("pt_b");
    std::istringstream in(dat);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      double kval = 0.0, v = 0.0;
      std::string extra;
      REQUIRE((row >> kval >> v));
      REQUIRE_FALSE((row >> extra));
      REQUIRE(kval == ladder[lines]);
      ++lines;
    }
    REQUIRE(lines == ladder.size());
  }

  SECTION("magnitude mode reports |value| for off-diagonal pairs") {
    const std::vector<NamedPair> pairs{
        {"mixed",
         {Complex(0.6, 0.0), Complex(0.0, 0.8)},
         {Complex(0.55, 0.1), Complex(0.05, 0.75)}}};
    const ScanTable table = offdiagonal_scan(setup, pairs, ladder);
    REQUIRE(table.rows.size() == 3);
    const std::string dat = table.dat_for("mixed", /*magnitude=*/true);
    std::istringstream in(dat);
    double kval = 0.0, v = 0.0;
    std::size_t i = 0;
    while (in >> kval >> v) {
      REQUIRE(v ==
              Catch::Approx(std::abs(table.rows[i].value)).epsilon(1e-12));
      REQUIRE(v >= 0.0);
      ++i;
    }
    REQUIRE(i == 3);
  }

  SECTION("parallel evaluation matches the single-threaded table") {
    const ScanTable one = diagonal_scan(setup, points, ladder, /*jobs=*/1);
    const ScanTable two = diagonal_scan(setup, points, ladder, /*jobs=*/2);
    REQUIRE(one.to_csv() == two.to_csv());
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
      REQUIRE(one.rows[i].value == two.rows[i].value);
    }
  }

  SECTION("csv files land on disk byte-for-byte") {
    const ScanTable table = diagonal_scan(setup, points, ladder);
    const std::string path =
        (std::filesystem::temp_directory_path() / "scan_probe.csv").string();
    table.write_csv(path);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    REQUIRE(content.str() == table.to_csv());
    std::remove(path.c_str());
  }
}

TEST_CASE("scan and evaluation preconditions are enforced", "[kernels]") {
  ScanSetup setup;
  setup.domain = Ball(2);
  setup.generator = RotationGenerator{{1.0, 1.0}};
  setup.profile = ChiProfile(1.5, 0.5);
  const std::vector<NamedPoint> points{
      {"pt", {Complex(0.5, 0.0), Complex(0.0, 0.0)}}};

  SECTION("ladders must be nonempty, positive, strictly ascending") {
    REQUIRE_THROWS_AS(diagonal_scan(setup, points, {}), ConfigError);
    REQUIRE_THROWS_AS(diagonal_scan(setup, points, {10.0, 10.0}), ConfigError);
    REQUIRE_THROWS_AS(diagonal_scan(setup, points, {20.0, 10.0}), ConfigError);
    REQUIRE_THROWS_AS(diagonal_scan(setup, points, {-5.0, 10.0}), ConfigError);
    REQUIRE_THROWS_AS(diagonal_scan(setup, {}, {10.0}), ConfigError);
    REQUIRE_THROWS_AS(offdiagonal_scan(setup, {}, {10.0}), ConfigError);
  }

  SECTION("points outside the closed domain are rejected") {
    const DomainSpec ball = Ball(2);
    const RotationGenerator gen{{1.0, 1.0}};
    const ChiProfile chi(1.5, 0.5);
    const std::vector<Complex> outside{Complex(1.1, 0.0), Complex(0.0, 0.0)};
    const std::vector<Complex> inside{Complex(0.9, 0.0), Complex(0.0, 0.0)};
    REQUIRE_THROWS_AS(
        kernel_eval_streaming(ball, gen, chi, 20.0, outside, inside),
        ConfigError);
    REQUIRE_THROWS_AS(kernel_eval_streaming(ball, gen, chi, 20.0, inside,
                                            inside, /*boundary=*/true),
                      NotOnBoundary);
    const std::vector<Complex> wrong_dim{Complex(0.5, 0.0)};
    REQUIRE_THROWS_AS(
        kernel_eval_streaming(ball, gen, chi, 20.0, wrong_dim, wrong_dim),
        ConfigError);
  }

  SECTION("the boundary kernel requires the sphere model") {
    const DomainSpec ell = HermitianEllipsoid(2, {1.0, 4.0});
    const RotationGenerator gen{{1.0, 1.0}};
    const ChiProfile chi(1.5, 0.5);
    const std::vector<Complex> z{Complex(1.0, 0.0), Complex(0.0, 0.0)};
    REQUIRE_THROWS_AS(
        kernel_eval_streaming(ell, gen, chi, 20.0, z, z, /*boundary=*/true),
        ConfigError);
  }

  SECTION("a tiny term budget is rejected up front") {
    const DomainSpec ball = Ball(2);
    const RotationGenerator gen{{1.0, 1.0}};
    const ChiProfile chi(1.5, 0.5);
    const std::vector<Complex> z{Complex(0.6, 0.0), Complex(0.0, 0.8)};
    REQUIRE_THROWS_AS(kernel_eval_streaming(ball, gen, chi, 100.0, z, z,
                                            /*boundary=*/false,
                                            /*term_budget=*/10),
                      CapacityExceeded);
  }
}
