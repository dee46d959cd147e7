#pragma once

// Predicted leading quantities (b0, A0, trace constants) computed from the
// boundary geometry alone, growth-order fits from ladder scans, and the
// pass/fail verdict machinery that compares the two. Every predicted
// constant is obtained by quadrature, every empirical constant by exact
// summation; verdicts judge only their ratios.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/domain.hpp"
#include "speclab/geometry.hpp"
#include "speclab/kernels.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

// Geometric data entering the leading coefficients at one boundary point.
struct Prediction {
  std::vector<Complex> point;
  double b0 = 0.0;              // interior-projector leading coefficient
  double A0 = 0.0;              // boundary-projector leading coefficient
  int order_interior = 0;       // n + 1
  int order_boundary = 0;       // n
  double alpha_at_point = 0.0;  // omega_0(T)(x)
  double det_levi = 1.0;
};

struct AsymptoticsReport {
  std::string claim;
  bool pass = false;
  double tolerance = 0.0;
  std::vector<double> k_ladder;
  // Ordered scalar and sequence panels; serialized verbatim into reports.
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::string notes;

  double value(const std::string& key) const {
    for (const auto& kv : values) {
      if (kv.first == key) return kv.second;
    }
    throw ConfigError("report has no value named " + key);
  }
};

namespace detail {

struct BoundaryGeometry {
  DefiningFunction rho;
  RealVec x;
  double alpha = 0.0;
  double det_levi = 1.0;
};

inline BoundaryGeometry boundary_geometry(const DomainSpec& domain,
                                          const RotationGenerator& gen,
                                          const std::vector<Complex>& z) {
  if (static_cast<int>(z.size()) != domain.n) {
    throw ConfigError("point dimension must equal domain dimension");
  }
  BoundaryGeometry out;
  out.x = embed_point(z);
  out.rho = normalize_defining_function(model_defining_function(domain), out.x);
  const LeviSpectrum levi = levi_spectrum(out.rho, out.x);
  if (!levi.all_positive) {
    throw ConfigError("Levi form is not positive definite at the point");
  }
  out.det_levi = levi.det_levi;
  out.alpha = decompose_reeb_like(out.rho, out.x, gen.field_at(out.x)).alpha;
  return out;
}

// integral of chi(t * alpha) * t^p over the support, absolute tolerance 1e-12.
inline double profile_moment(const ProfileView& profile, double alpha, int p) {
  if (!(alpha > 0.0)) {
    throw NonPositiveAlpha("profile moment needs alpha > 0");
  }
  return adaptive_integrate(
      [&](double t) {
        double tp = 1.0;
        for (int i = 0; i < p; ++i) tp *= t;
        return profile.eval(t * alpha) * tp;
      },
      profile.t_min / alpha, profile.t_max / alpha, 1e-12);
}

}  // namespace detail

// pi^{-n} det(L_x) * int chi(t alpha(x)) t^n dt   (interior leading term).
inline double predict_b0(const DomainSpec& domain, const std::vector<Complex>& x,
                         const ProfileView& profile,
                         const RotationGenerator& gen) {
  gen.validate();
  const detail::BoundaryGeometry g = detail::boundary_geometry(domain, gen, x);
  return g.det_levi / pi_pow(domain.n) *
         detail::profile_moment(profile, g.alpha, domain.n);
}

// Same quantity through the substitution s = t alpha:
// pi^{-n} det(L_x) alpha^{-(n+1)} int chi(s) s^n ds. Used as a cross-check.
inline double predict_b0_substitution(const DomainSpec& domain,
                                      const std::vector<Complex>& x,
                                      const ProfileView& profile,
                                      const RotationGenerator& gen) {
  gen.validate();
  const detail::BoundaryGeometry g = detail::boundary_geometry(domain, gen, x);
  double apow = 1.0;
  for (int i = 0; i < domain.n + 1; ++i) apow *= g.alpha;
  return g.det_levi / pi_pow(domain.n) / apow *
         detail::profile_moment(profile, 1.0, domain.n);
}

// (1/2) pi^{-n} det(L_x) * int chi(t alpha(x)) t^{n-1} dt  (boundary term).
inline double predict_A0(const DomainSpec& domain, const std::vector<Complex>& x,
                         const ProfileView& profile,
                         const RotationGenerator& gen) {
  gen.validate();
  const detail::BoundaryGeometry g = detail::boundary_geometry(domain, gen, x);
  return g.det_levi / (2.0 * pi_pow(domain.n)) *
         detail::profile_moment(profile, g.alpha, domain.n - 1);
}

inline Prediction predict_at(const DomainSpec& domain,
                             const std::vector<Complex>& x,
                             const ProfileView& profile,
                             const RotationGenerator& gen) {
  const detail::BoundaryGeometry g = detail::boundary_geometry(domain, gen, x);
  Prediction p;
  p.point = x;
  p.order_interior = domain.n + 1;
  p.order_boundary = domain.n;
  p.alpha_at_point = g.alpha;
  p.det_levi = g.det_levi;
  p.b0 = g.det_levi / pi_pow(domain.n) *
         detail::profile_moment(profile, g.alpha, domain.n);
  p.A0 = g.det_levi / (2.0 * pi_pow(domain.n)) *
         detail::profile_moment(profile, g.alpha, domain.n - 1);
  return p;
}

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square log residual
};

// Ordinary least squares of log(value) against log(k).
inline GrowthFit fit_growth_order(const std::vector<double>& k_ladder,
                                  const std::vector<double>& values) {
  if (k_ladder.size() != values.size()) {
    throw ConfigError("ladder and value counts differ");
  }
  if (k_ladder.size() < 4) {
    throw ConfigError("growth fit needs at least 4 ladder rungs");
  }
  detail::check_ladder(k_ladder);
  const std::size_t m = values.size();
  for (double v : values) {
    if (!(v > 0.0)) {
      throw NonPositiveValue("growth fit needs positive values");
    }
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(k_ladder[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dm = static_cast<double>(m);
  GrowthFit fit;
  fit.slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / dm;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = std::log(values[i]) -
                     (fit.intercept + fit.slope * std::log(k_ladder[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / dm);
  return fit;
}

// ----------------------------------------------------------------------------
// Verdict-producing claim checks.

// r(k) = K(x,x;k) / (k^{n+1} b0(x)) must approach 1: |r(k_max) - 1| within
// tolerance, |r(k) - 1| nonincreasing, and the deviations consistent with a
// C/k envelope fitted by least squares (factor 1.5 slack).
inline AsymptoticsReport leading_ratio_test(
    const DomainSpec& domain, const std::vector<Complex>& x,
    const ProfileView& profile, const RotationGenerator& gen,
    const std::vector<double>& k_ladder, double tolerance = 0.03,
    std::uint64_t term_budget = 50000000ull) {
  detail::check_ladder(k_ladder);
  const double b0 = predict_b0(domain, x, profile, gen);
  AsymptoticsReport rep;
  rep.claim = "leading_ratio";
  rep.tolerance = tolerance;
  rep.k_ladder = k_ladder;
  std::vector<double> ratio, dev, scaled_dev;
  for (double k : k_ladder) {
    const KernelSample s = kernel_eval_streaming(
        domain, gen, profile, k, x, x, false, term_budget);
    double kpow = 1.0;
    for (int i = 0; i < domain.n + 1; ++i) kpow *= k;
    const double r = s.value.real() / (kpow * b0);
    ratio.push_back(r);
    dev.push_back(std::abs(r - 1.0));
    scaled_dev.push_back(std::abs(r - 1.0) * k);
  }
  // Least-squares C for |r - 1| ~ C/k.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k_ladder.size(); ++i) {
    num += dev[i] / k_ladder[i];
    den += 1.0 / (k_ladder[i] * k_ladder[i]);
  }
  const double envelope_c = den > 0.0 ? num / den : 0.0;
  bool pass = dev.back() <= tolerance;
  for (std::size_t i = 0; i + 1 < dev.size(); ++i) {
    if (dev[i + 1] > dev[i]) pass = false;
  }
  for (std::size_t i = 0; i < dev.size(); ++i) {
    if (dev[i] > 1.5 * envelope_c / k_ladder[i]) pass = false;
  }
  rep.pass = pass;
  rep.values.emplace_back("b0", b0);
  rep.values.emplace_back("envelope_c", envelope_c);
  rep.values.emplace_back("final_deviation", dev.back());
  rep.series.emplace_back("ratio", ratio);
  rep.series.emplace_back("deviation_times_k", scaled_dev);
  return rep;
}

// K(z,z;k)/K(x,x;k) against int chi(t a) t^n e^{2 k t rho(z)} dt /
// int chi(t a) t^n dt for z = (1-s) x, plus the large-k log-derivative law
// d log K / dk -> 2 t_min rho(z) (in the pairing-scaled variable).
inline AsymptoticsReport interior_damping_test(
    const DomainSpec& domain, const std::vector<Complex>& x, double depth,
    const ProfileView& profile, const RotationGenerator& gen,
    const std::vector<double>& k_ladder, double tolerance = 0.10,
    std::uint64_t term_budget = 50000000ull) {
  detail::check_ladder(k_ladder);
  if (depth < 0.0) throw ConfigError("depth must be nonnegative");
  if (depth > 0.05) {
    throw DepthTooLarge("depth " + format_double(depth) +
                        " exceeds 0.05; the cubic error term dominates");
  }
  const detail::BoundaryGeometry g = detail::boundary_geometry(domain, gen, x);
  std::vector<Complex> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (1.0 - depth) * x[j];
  const double rho_z = g.rho.value(embed_point(z));

  AsymptoticsReport rep;
  rep.claim = "interior_damping";
  rep.tolerance = tolerance;
  rep.k_ladder = k_ladder;

  const int n = domain.n;
  const double denom = detail::profile_moment(profile, g.alpha, n);
  std::vector<double> empirical, predicted, log_inner;
  bool ratio_ok = true;
  for (double k : k_ladder) {
    const KernelSample inner = kernel_eval_streaming(
        domain, gen, profile, k, z, z, false, term_budget);
    const KernelSample edge = kernel_eval_streaming(
        domain, gen, profile, k, x, x, false, term_budget);
    const double emp = inner.value.real() / edge.value.real();
    const double pred =
        adaptive_integrate(
            [&](double t) {
              double tp = 1.0;
              for (int i = 0; i < n; ++i) tp *= t;
              return profile.eval(t * g.alpha) * tp *
                     std::exp(2.0 * k * t * rho_z);
            },
            profile.t_min / g.alpha, profile.t_max / g.alpha, 1e-12) /
        denom;
    empirical.push_back(emp);
    predicted.push_back(pred);
    log_inner.push_back(std::log(std::max(inner.value.real(), 1e-300)));
    if (std::abs(emp / pred - 1.0) > tolerance) ratio_ok = false;
  }

  // Finite-difference log slope over the top ladder pair vs the damping law.
  bool slope_ok = true;
  double slope = 0.0, target = 0.0;
  if (depth > 0.0) {
    const std::size_t last = k_ladder.size() - 1;
    slope = (log_inner[last] - log_inner[last - 1]) /
            (k_ladder[last] - k_ladder[last - 1]);
    target = 2.0 * (profile.t_min / g.alpha) * rho_z;
    slope_ok = std::abs(slope / target - 1.0) <= tolerance;
  }

  rep.pass = ratio_ok && slope_ok;
  rep.values.emplace_back("depth", depth);
  rep.values.emplace_back("rho_at_z", rho_z);
  rep.values.emplace_back("alpha", g.alpha);
  rep.values.emplace_back("log_slope", slope);
  rep.values.emplace_back("log_slope_target", target);
  rep.series.emplace_back("empirical_ratio", empirical);
  rep.series.emplace_back("predicted_ratio", predicted);
  rep.notes = depth == 0.0 ? "zero depth: ratio clause only" : "";
  return rep;
}

// Tr chi_k over the ladder: Tr/k^n must stay inside [0.5 m, 2 M] with m, M
// the min/max of the sequence over the upper half of the ladder, and the
// fitted order must be n within 0.05.
inline AsymptoticsReport trace_scan(const DomainSpec& domain,
                                    const RotationGenerator& gen,
                                    const ProfileView& profile,
                                    const std::vector<double>& k_ladder) {
  detail::check_ladder(k_ladder);
  gen.validate();
  if (gen.n() != domain.n) {
    throw ConfigError("generator dimension must equal domain dimension");
  }
  AsymptoticsReport rep;
  rep.claim = "trace_bounds";
  rep.tolerance = 0.05;  // on the fitted order
  rep.k_ladder = k_ladder;
  std::vector<double> traces, normalized;
  for (double k : k_ladder) {
    const double tr = projector_trace(gen, profile, k);
    double kpow = 1.0;
    for (int i = 0; i < domain.n; ++i) kpow *= k;
    traces.push_back(tr);
    normalized.push_back(tr / kpow);
  }
  const std::size_t half = k_ladder.size() / 2;
  double lo = normalized[half], hi = normalized[half];
  for (std::size_t i = half; i < normalized.size(); ++i) {
    lo = std::min(lo, normalized[i]);
    hi = std::max(hi, normalized[i]);
  }
  bool pass = true;
  for (double v : normalized) {
    if (v < 0.5 * lo || v > 2.0 * hi) pass = false;
  }
  const GrowthFit fit = fit_growth_order(k_ladder, traces);
  if (std::abs(fit.slope - domain.n) > 0.05) pass = false;
  rep.pass = pass;
  rep.values.emplace_back("fitted_order", fit.slope);
  rep.values.emplace_back("band_lo", 0.5 * lo);
  rep.values.emplace_back("band_hi", 2.0 * hi);
  rep.series.emplace_back("trace", traces);
  rep.series.emplace_back("trace_over_kn", normalized);
  return rep;
}

// Exact boundary trace against (k^n / 2 pi^n) int_X det(L_x)
// int chi(t alpha(x)) t^{n-1} dt dsigma(x), the X-integral by product
// quadrature on the sphere.
inline AsymptoticsReport boundary_trace_test(
    int n, const RotationGenerator& gen, const ProfileView& profile,
    const std::vector<double>& k_ladder, double tolerance = 0.0,
    int points_per_axis = 64) {
  detail::check_ladder(k_ladder);
  gen.validate();
  if (gen.n() != n) {
    throw ConfigError("generator dimension must equal the sphere dimension");
  }
  bool uniform = true;
  for (double l : gen.lambda) {
    if (l != gen.lambda[0]) uniform = false;
  }
  if (tolerance <= 0.0) tolerance = uniform ? 0.05 : 0.10;

  const DomainSpec ball = Ball(n);
  const DefiningFunction raw = model_defining_function(ball);
  const std::vector<BoundaryNode> nodes = boundary_quadrature(ball, points_per_axis);
  const QuadratureRule inner = gauss_legendre(64);
  double geometric = 0.0;  // int_X det L int chi(t alpha) t^{n-1} dt dsigma
  for (const BoundaryNode& node : nodes) {
    const RealVec xr = embed_point(node.z);
    const DefiningFunction rho = normalize_defining_function(raw, xr);
    const double det = levi_spectrum(rho, xr).det_levi;
    const double alpha =
        decompose_reeb_like(rho, xr, gen.field_at(xr)).alpha;
    const double t_lo = profile.t_min / alpha;
    const double t_hi = profile.t_max / alpha;
    double moment = 0.0;
    for (std::size_t i = 0; i < inner.nodes.size(); ++i) {
      const double t = 0.5 * (t_hi + t_lo) + 0.5 * (t_hi - t_lo) * inner.nodes[i];
      double tp = 1.0;
      for (int p = 0; p < n - 1; ++p) tp *= t;
      moment += 0.5 * (t_hi - t_lo) * inner.weights[i] *
                profile.eval(t * alpha) * tp;
    }
    geometric += node.weight * det * moment;
  }

  AsymptoticsReport rep;
  rep.claim = "boundary_trace";
  rep.tolerance = tolerance;
  rep.k_ladder = k_ladder;
  std::vector<double> empirical, predicted;
  for (double k : k_ladder) {
    double kpow = 1.0;
    for (int i = 0; i < n; ++i) kpow *= k;
    empirical.push_back(projector_trace(gen, profile, k));
    predicted.push_back(kpow / (2.0 * pi_pow(n)) * geometric);
  }
  const double final_ratio = empirical.back() / predicted.back();
  rep.pass = std::abs(final_ratio - 1.0) <= tolerance;
  rep.values.emplace_back("final_ratio", final_ratio);
  rep.values.emplace_back("geometric_integral", geometric);
  rep.series.emplace_back("empirical_trace", empirical);
  rep.series.emplace_back("predicted_trace", predicted);
  return rep;
}

// |K| k^N decreasing over the ladder's upper half for N in {4, 6, 8}; pairs
// whose kernel vanishes identically pass outright.
inline AsymptoticsReport offdiagonal_decay_test(
    const DomainSpec& domain, const std::vector<NamedPair>& pairs,
    const ProfileView& profile, const RotationGenerator& gen,
    const std::vector<double>& k_ladder,
    std::uint64_t term_budget = 50000000ull, int jobs = 1) {
  detail::check_ladder(k_ladder);
  if (pairs.empty()) throw ConfigError("decay test needs pairs");
  ScanSetup setup;
  setup.domain = domain;
  setup.generator = gen;
  setup.profile = profile;
  setup.boundary = false;
  setup.term_budget = term_budget;
  const ScanTable table = offdiagonal_scan(setup, pairs, k_ladder, jobs);

  AsymptoticsReport rep;
  rep.claim = "offdiagonal_decay";
  rep.k_ladder = k_ladder;
  bool pass = true;
  for (const NamedPair& pair : pairs) {
    const std::vector<ScanRow> rows = table.rows_for(pair.id);
    std::vector<double> mags;
    for (const ScanRow& r : rows) mags.push_back(std::abs(r.value));
    bool all_zero = true;
    for (double m : mags) {
      if (m != 0.0) all_zero = false;
    }
    rep.series.emplace_back("abs_" + pair.id, mags);
    if (all_zero) continue;
    for (const int power : {4, 6, 8}) {
      std::vector<double> scaled;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double kp = 1.0;
        for (int p = 0; p < power; ++p) kp *= k_ladder[i];
        scaled.push_back(mags[i] * kp);
      }
      for (std::size_t i = k_ladder.size() / 2; i + 1 < scaled.size(); ++i) {
        const bool both_zero = scaled[i] == 0.0 && scaled[i + 1] == 0.0;
        if (!(scaled[i + 1] < scaled[i] || both_zero)) pass = false;
      }
      rep.series.emplace_back(
          "k" + std::to_string(power) + "_scaled_" + pair.id, scaled);
    }
  }
  rep.pass = pass;
  return rep;
}

}  // namespace speclab
