#pragma once

// Spectral projectors chi(T/k) of the rotation Toeplitz operator. For the
// generator field T_lambda(z)_j = i lambda_j z_j the operator acts diagonally
// on monomials, T z^alpha = <lambda, alpha> z^alpha, so the projector is an
// explicit weighted sum over multi-indices: weight chi(<lambda,alpha>/k) on
// the normalized monomial z^alpha. The representation below is exact, not a
// truncation: every index with nonzero weight satisfies
// |alpha| <= ceil(k t_max / min_j lambda_j).

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "speclab/chi.hpp"
#include "speclab/common.hpp"
#include "speclab/domain.hpp"
#include "speclab/geometry.hpp"
#include "speclab/multiindex.hpp"

namespace speclab {

struct RotationGenerator {
  std::vector<double> lambda;

  RotationGenerator() = default;
  explicit RotationGenerator(std::vector<double> l) : lambda(std::move(l)) {
    validate();
  }

  void validate() const {
    if (lambda.empty()) throw ConfigError("generator needs >= 1 weight");
    for (double l : lambda) {
      if (!(l > 0.0)) {
        throw NonPositiveValue("generator weights must be > 0");
      }
    }
  }

  int n() const { return static_cast<int>(lambda.size()); }

  double min_lambda() const {
    double m = lambda[0];
    for (double l : lambda) m = std::min(m, l);
    return m;
  }

  double max_lambda() const {
    double m = lambda[0];
    for (double l : lambda) m = std::max(m, l);
    return m;
  }

  // Value of the rotation field at an interleaved real point:
  // d/dt (z_j e^{i lambda_j t}) = (-lambda_j y_j, lambda_j x_j).
  RealVec field_at(const RealVec& x) const {
    RealVec v(x.size());
    for (int j = 0; j < n(); ++j) {
      v[2 * j] = -lambda[static_cast<std::size_t>(j)] * x[2 * j + 1];
      v[2 * j + 1] = lambda[static_cast<std::size_t>(j)] * x[2 * j];
    }
    return v;
  }
};

// Eigenvalue of the Toeplitz operator on z^alpha: <lambda, alpha>.
inline double toeplitz_eigenvalue(const RotationGenerator& gen,
                                  const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != gen.n()) {
    throw ConfigError("multi-index length must equal generator dimension");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] < 0) throw NonPositiveAlpha("multi-index entries must be >= 0");
    s += gen.lambda[j] * static_cast<double>(alpha[j]);
  }
  return s;
}

// A weight profile as consumed by projector construction: any function with
// support contained in [t_min, t_max] subset of (0, inf). ChiProfile
// converts implicitly; explicit construction admits derived profiles such
// as the pointwise square of a bump.
struct ProfileView {
  std::function<double(double)> eval;
  double t_min = 0.0;
  double t_max = 0.0;

  ProfileView() = default;
  ProfileView(std::function<double(double)> f, double lo, double hi)
      : eval(std::move(f)), t_min(lo), t_max(hi) {
    if (!(t_min > 0.0) || !(t_max > t_min)) {
      throw ConfigError("profile support must satisfy 0 < t_min < t_max");
    }
  }
  ProfileView(const ChiProfile& chi)  // NOLINT: implicit by design
      : t_min(chi.t_min()), t_max(chi.t_max()) {
    chi.validate();
    eval = [chi](double t) { return chi(t); };
  }
};

struct ProjectorRecord {
  MultiIndex alpha;
  double pairing;      // <lambda, alpha>
  double weight;       // chi(pairing / k), nonzero by construction
  double log_norm_sq;  // log ||z^alpha||^2 in the representing space
};

struct SpectralProjectorRep {
  DomainSpec domain;
  RotationGenerator generator;
  double k = 0.0;
  int max_degree = 0;   // the enumeration bound D
  bool boundary = false;  // true: sphere norms; false: interior norms
  std::vector<ProjectorRecord> records;

  double trace() const {
    double s = 0.0;
    for (const ProjectorRecord& r : records) s += r.weight;
    return s;
  }

  std::size_t rank() const { return records.size(); }

  std::string records_csv() const {
    std::ostringstream out;
    for (int j = 1; j <= domain.n; ++j) out << "alpha_" << j << ",";
    out << "pairing,weight,log_norm_sq\n";
    for (const ProjectorRecord& r : records) {
      for (int v : r.alpha) out << v << ",";
      out << format_double(r.pairing) << "," << format_double(r.weight) << ","
          << format_double(r.log_norm_sq) << "\n";
    }
    return out.str();
  }
};

namespace detail {

struct DegreeWindow {
  int d_min;
  int d_max;  // equals ceil(k t_max / min lambda), the exactness bound D
};

inline DegreeWindow degree_window(const std::vector<double>& lambda,
                                  const ProfileView& profile, double k) {
  double lmin = lambda[0], lmax = lambda[0];
  for (double l : lambda) {
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  DegreeWindow w;
  w.d_min = std::max(0, static_cast<int>(std::floor(k * profile.t_min / lmax)));
  w.d_max = static_cast<int>(std::ceil(k * profile.t_max / lmin));
  return w;
}

}  // namespace detail

// Streams every record with nonzero weight, restricted to indices supported
// on the coordinate subset `support` (other components pinned to zero).
// This keeps scans at points with zero coordinates, and at large k in
// several variables, within memory: nothing is materialized.
inline void for_each_projector_record(
    const RotationGenerator& gen, const ProfileView& profile, double k,
    const std::vector<int>& support,
    const std::function<void(const MultiIndex&, double, double)>& fn) {
  gen.validate();
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  const int n = gen.n();
  MultiIndex alpha(static_cast<std::size_t>(n), 0);
  if (support.empty()) {
    // Only alpha = 0 is admissible; its weight chi(0) = 0 by the support
    // rule, so there is nothing to visit.
    return;
  }
  std::vector<double> masked_lambda;
  masked_lambda.reserve(support.size());
  for (int j : support) {
    if (j < 0 || j >= n) throw ConfigError("support index out of range");
    masked_lambda.push_back(gen.lambda[static_cast<std::size_t>(j)]);
  }
  const detail::DegreeWindow win =
      detail::degree_window(masked_lambda, profile, k);
  const int m = static_cast<int>(support.size());
  MultiIndex beta(static_cast<std::size_t>(m), 0);
  for (int d = std::max(win.d_min, 1); d <= win.d_max; ++d) {
    detail::visit_degree(beta, 0, d, [&](const MultiIndex& b) {
      double pairing = 0.0;
      for (int i = 0; i < m; ++i) {
        pairing += masked_lambda[static_cast<std::size_t>(i)] *
                   static_cast<double>(b[static_cast<std::size_t>(i)]);
      }
      const double weight = profile.eval(pairing / k);
      if (weight == 0.0) return;
      for (int i = 0; i < m; ++i) {
        alpha[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])] =
            b[static_cast<std::size_t>(i)];
      }
      fn(alpha, pairing, weight);
      for (int i = 0; i < m; ++i) {
        alpha[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])] = 0;
      }
    });
  }
}

inline std::vector<int> full_support(int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = j;
  return s;
}

namespace detail {

inline SpectralProjectorRep build_projector_impl(
    const DomainSpec& domain, const RotationGenerator& gen,
    const ProfileView& profile, double k, bool boundary,
    std::uint64_t budget) {
  domain.validate();
  gen.validate();
  if (gen.n() != domain.n) {
    throw ConfigError("generator dimension must equal domain dimension");
  }
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  const DegreeWindow win = degree_window(gen.lambda, profile, k);
  std::uint64_t scanned = 0;
  for (int d = std::max(win.d_min, 0); d <= win.d_max; ++d) {
    scanned += count_multiindices_of_degree(domain.n, d);
    if (scanned > budget) {
      throw CapacityExceeded("projector index scan of " +
                             std::to_string(scanned) + "+ indices exceeds budget " +
                             std::to_string(budget));
    }
  }
  SpectralProjectorRep rep;
  rep.domain = domain;
  rep.generator = gen;
  rep.k = k;
  rep.max_degree = win.d_max;
  rep.boundary = boundary;
  for_each_projector_record(
      gen, profile, k, full_support(domain.n),
      [&](const MultiIndex& alpha, double pairing, double weight) {
        ProjectorRecord r;
        r.alpha = alpha;
        r.pairing = pairing;
        r.weight = weight;
        r.log_norm_sq = boundary
                            ? log_sphere_monomial_norm_sq(domain.n, alpha)
                            : log_monomial_norm_sq(domain, alpha);
        rep.records.push_back(std::move(r));
      });
  return rep;
}

}  // namespace detail

// Materialized projector over the domain interior (Bergman side).
inline SpectralProjectorRep build_projector(const DomainSpec& domain,
                                            const RotationGenerator& gen,
                                            const ProfileView& profile,
                                            double k,
                                            std::uint64_t budget = 10000000ull) {
  return detail::build_projector_impl(domain, gen, profile, k, false, budget);
}

// Boundary (Szego side) variant on the unit sphere: identical index set and
// weights, sphere norms in place of interior norms.
inline SpectralProjectorRep build_boundary_projector(
    int n, const RotationGenerator& gen, const ProfileView& profile, double k,
    std::uint64_t budget = 10000000ull) {
  return detail::build_projector_impl(Ball(n), gen, profile, k, true, budget);
}

// Trace of chi(T/k) without materializing records; valid for both interior
// and boundary variants, whose weights coincide.
inline double projector_trace(const RotationGenerator& gen,
                              const ProfileView& profile, double k) {
  double s = 0.0;
  for_each_projector_record(gen, profile, k, full_support(gen.n()),
                            [&](const MultiIndex&, double, double w) { s += w; });
  return s;
}

}  // namespace speclab
