#pragma once

// Pointwise evaluation of the projector kernel
//   K_k(z, w) = sum_alpha chi(<lambda, alpha>/k) z^alpha conj(w)^alpha
//               / ||z^alpha||^2
// for the interior (Bergman-type) and boundary (Szego-type) representations,
// plus ladder scans over (point, k) cells.
//
// Terms are assembled in log space: each term is split into a log magnitude
//   log weight + sum_j alpha_j log|z_j conj(w_j)| - log ||z^alpha||^2
// and a phase sum_j alpha_j arg(z_j conj(w_j)), then folded into a running
// sum that is rescaled whenever a new largest term appears. Degrees near 800
// are routine; the only singular path, a zero coordinate, is short-circuited
// before any log is taken.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/domain.hpp"
#include "speclab/multiindex.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

struct KernelSample {
  std::vector<Complex> z;
  std::vector<Complex> w;
  double k = 0.0;
  Complex value{0.0, 0.0};
  std::uint64_t terms_used = 0;
  double max_term_log = -std::numeric_limits<double>::infinity();
};

namespace detail {

// Running sum of terms exp(log_mag + i phase), kept scaled so that the
// largest term seen so far has magnitude one. Terms far below the current
// maximum underflow to zero harmlessly; a new maximum rescales the
// accumulated value once.
class ScaledSum {
 public:
  void add(double log_mag, double phase) {
    ++terms_;
    if (log_mag > max_log_) {
      sum_ *= std::exp(max_log_ - log_mag);
      max_log_ = log_mag;
    }
    const double m = std::exp(log_mag - max_log_);
    sum_ += Complex(m * std::cos(phase), m * std::sin(phase));
  }

  std::uint64_t terms() const { return terms_; }
  double max_log() const { return max_log_; }

  Complex value() const {
    if (terms_ == 0) return Complex(0.0, 0.0);
    return std::exp(max_log_) * sum_;
  }

  // Digits lost to cancellation: log(max |term| / |sum|). A result whose
  // magnitude sits more than e^36 ~ 4e15 below the largest term has no
  // correct digits left in double precision.
  void check_stable() const {
    if (terms_ == 0) return;
    const double mag = std::abs(sum_);
    if (!(mag > 0.0) || -std::log(mag) > 36.0) {
      throw UnstableSummation(
          "catastrophic cancellation: result is more than e^36 below the "
          "largest term; a higher-precision path is required");
    }
  }

 private:
  Complex sum_{0.0, 0.0};
  double max_log_ = -std::numeric_limits<double>::infinity();
  std::uint64_t terms_ = 0;
};

struct PairCoordinates {
  std::vector<double> log_mag;   // log|z_j conj(w_j)|, only on the support
  std::vector<double> phase;     // arg(z_j conj(w_j)), zero off support
  std::vector<int> support;      // indices with z_j != 0 and w_j != 0
};

inline PairCoordinates pair_coordinates(const std::vector<Complex>& z,
                                        const std::vector<Complex>& w) {
  PairCoordinates pc;
  const std::size_t n = z.size();
  pc.log_mag.assign(n, 0.0);
  pc.phase.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (z[j] == Complex(0.0, 0.0) || w[j] == Complex(0.0, 0.0)) continue;
    const Complex p = z[j] * std::conj(w[j]);
    pc.log_mag[j] = std::log(std::abs(p));
    pc.phase[j] = std::arg(p);
    pc.support.push_back(static_cast<int>(j));
  }
  return pc;
}

inline void check_interior_point(const DomainSpec& domain,
                                 const std::vector<Complex>& z) {
  if (static_cast<int>(z.size()) != domain.n) {
    throw ConfigError("point dimension must equal domain dimension");
  }
  double rho = -1.0;
  for (int j = 0; j < domain.n; ++j) {
    rho += domain.a[static_cast<std::size_t>(j)] * std::norm(z[static_cast<std::size_t>(j)]);
  }
  if (rho > 1e-9) {
    throw ConfigError("point lies outside the closed domain");
  }
}

inline void check_boundary_point(int n, const std::vector<Complex>& z) {
  if (static_cast<int>(z.size()) != n) {
    throw ConfigError("point dimension must equal domain dimension");
  }
  double r2 = 0.0;
  for (const Complex& c : z) r2 += std::norm(c);
  if (std::abs(r2 - 1.0) > 1e-9) {
    throw NotOnBoundary("boundary kernel point must lie on the unit sphere");
  }
}

}  // namespace detail

// Evaluates the kernel from a materialized projector representation.
inline KernelSample kernel_eval(const SpectralProjectorRep& proj,
                                const std::vector<Complex>& z,
                                const std::vector<Complex>& w) {
  if (proj.boundary) {
    detail::check_boundary_point(proj.domain.n, z);
    detail::check_boundary_point(proj.domain.n, w);
  } else {
    detail::check_interior_point(proj.domain, z);
    detail::check_interior_point(proj.domain, w);
  }
  const detail::PairCoordinates pc = detail::pair_coordinates(z, w);
  const int n = proj.domain.n;
  std::vector<char> in_support(static_cast<std::size_t>(n), 0);
  for (int j : pc.support) in_support[static_cast<std::size_t>(j)] = 1;
  detail::ScaledSum sum;
  for (const ProjectorRecord& rec : proj.records) {
    double log_mag = std::log(rec.weight) - rec.log_norm_sq;
    double phase = 0.0;
    bool vanishes = false;
    for (int j = 0; j < n; ++j) {
      const int aj = rec.alpha[static_cast<std::size_t>(j)];
      if (aj == 0) continue;
      if (!in_support[static_cast<std::size_t>(j)]) {
        vanishes = true;  // z_j or w_j is zero and alpha_j > 0
        break;
      }
      log_mag += aj * pc.log_mag[static_cast<std::size_t>(j)];
      phase += aj * pc.phase[static_cast<std::size_t>(j)];
    }
    if (vanishes) continue;
    sum.add(log_mag, phase);
  }
  sum.check_stable();
  KernelSample out;
  out.z = z;
  out.w = w;
  out.k = proj.k;
  out.value = sum.value();
  out.terms_used = sum.terms();
  out.max_term_log = sum.max_log();
  return out;
}

// Evaluates the kernel without materializing records, restricting the index
// stream to the coordinates on which both points are nonzero. Mathematically
// identical to kernel_eval on a freshly built projector: the skipped indices
// contribute exactly zero.
inline KernelSample kernel_eval_streaming(
    const DomainSpec& domain, const RotationGenerator& gen,
    const ProfileView& profile, double k, const std::vector<Complex>& z,
    const std::vector<Complex>& w, bool boundary = false,
    std::uint64_t term_budget = 50000000ull) {
  domain.validate();
  gen.validate();
  if (gen.n() != domain.n) {
    throw ConfigError("generator dimension must equal domain dimension");
  }
  if (boundary && !domain.is_ball()) {
    throw ConfigError("boundary kernel is defined on the sphere model only");
  }
  if (boundary) {
    detail::check_boundary_point(domain.n, z);
    detail::check_boundary_point(domain.n, w);
  } else {
    detail::check_interior_point(domain, z);
    detail::check_interior_point(domain, w);
  }
  const detail::PairCoordinates pc = detail::pair_coordinates(z, w);

  if (!pc.support.empty()) {
    std::vector<double> masked_lambda;
    for (int j : pc.support) {
      masked_lambda.push_back(gen.lambda[static_cast<std::size_t>(j)]);
    }
    const detail::DegreeWindow win =
        detail::degree_window(masked_lambda, profile, k);
    const std::uint64_t m = static_cast<std::uint64_t>(pc.support.size());
    double count = 0.0;
    for (int d = std::max(win.d_min, 1); d <= win.d_max; ++d) {
      count += binomial(static_cast<std::int64_t>(d) + m - 1,
                        static_cast<std::int64_t>(m) - 1);
    }
    if (count > static_cast<double>(term_budget)) {
      throw CapacityExceeded("kernel evaluation needs about " +
                             format_double(count) + " terms, budget " +
                             std::to_string(term_budget));
    }
  }

  detail::ScaledSum sum;
  const int n = domain.n;
  for_each_projector_record(
      gen, profile, k, pc.support,
      [&](const MultiIndex& alpha, double /*pairing*/, double weight) {
        const double log_norm =
            boundary ? log_sphere_monomial_norm_sq(n, alpha)
                     : log_monomial_norm_sq(domain, alpha);
        double log_mag = std::log(weight) - log_norm;
        double phase = 0.0;
        for (int j : pc.support) {
          const int aj = alpha[static_cast<std::size_t>(j)];
          if (aj == 0) continue;
          log_mag += aj * pc.log_mag[static_cast<std::size_t>(j)];
          phase += aj * pc.phase[static_cast<std::size_t>(j)];
        }
        sum.add(log_mag, phase);
      });
  sum.check_stable();
  KernelSample out;
  out.z = z;
  out.w = w;
  out.k = k;
  out.value = sum.value();
  out.terms_used = sum.terms();
  out.max_term_log = sum.max_log();
  return out;
}

// ----------------------------------------------------------------------------
// Ladder scans.

struct NamedPoint {
  std::string id;
  std::vector<Complex> z;
};

struct NamedPair {
  std::string id;
  std::vector<Complex> z;
  std::vector<Complex> w;
};

struct ScanRow {
  std::string point_id;
  double k = 0.0;
  Complex value{0.0, 0.0};
  std::uint64_t terms_used = 0;
  double max_term_log = -std::numeric_limits<double>::infinity();
};

struct ScanTable {
  std::vector<ScanRow> rows;

  std::string to_csv() const {
    std::ostringstream out;
    out << "point_id,k,re_value,im_value,terms_used\n";
    for (const ScanRow& r : rows) {
      out << r.point_id << "," << format_double(r.k) << ","
          << format_double(r.value.real()) << ","
          << format_double(r.value.imag()) << "," << r.terms_used << "\n";
    }
    return out.str();
  }

  // Two-column (k, value) plot data for one point; magnitude selects |value|
  // instead of the real part (off-diagonal decay plots).
  std::string dat_for(const std::string& point_id, bool magnitude = false) const {
    std::ostringstream out;
    for (const ScanRow& r : rows) {
      if (r.point_id != point_id) continue;
      out << format_double(r.k) << " "
          << format_double(magnitude ? std::abs(r.value) : r.value.real())
          << "\n";
    }
    return out.str();
  }

  std::vector<ScanRow> rows_for(const std::string& point_id) const {
    std::vector<ScanRow> out;
    for (const ScanRow& r : rows) {
      if (r.point_id == point_id) out.push_back(r);
    }
    return out;
  }

  std::vector<std::string> point_ids() const {
    std::vector<std::string> ids;
    for (const ScanRow& r : rows) {
      if (std::find(ids.begin(), ids.end(), r.point_id) == ids.end()) {
        ids.push_back(r.point_id);
      }
    }
    return ids;
  }

  void write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << to_csv();
  }
};

// Configuration for rebuilding the projector at each rung of a ladder.
struct ScanSetup {
  DomainSpec domain;
  RotationGenerator generator;
  ProfileView profile;
  bool boundary = false;
  std::uint64_t term_budget = 50000000ull;
};

namespace detail {

inline void check_ladder(const std::vector<double>& k_ladder) {
  if (k_ladder.empty()) throw ConfigError("k ladder must be nonempty");
  for (std::size_t i = 0; i < k_ladder.size(); ++i) {
    if (!(k_ladder[i] > 0.0)) throw ConfigError("k ladder must be positive");
    if (i > 0 && !(k_ladder[i] > k_ladder[i - 1])) {
      throw ConfigError("k ladder must be strictly ascending");
    }
  }
}

}  // namespace detail

inline ScanTable diagonal_scan(const ScanSetup& setup,
                               const std::vector<NamedPoint>& points,
                               const std::vector<double>& k_ladder,
                               int jobs = 1) {
  if (points.empty()) throw ConfigError("diagonal scan needs points");
  detail::check_ladder(k_ladder);
  ScanTable table;
  table.rows.resize(points.size() * k_ladder.size());
  parallel_for(table.rows.size(), jobs, [&](std::size_t cell) {
    const std::size_t pi = cell / k_ladder.size();
    const std::size_t ki = cell % k_ladder.size();
    const KernelSample s = kernel_eval_streaming(
        setup.domain, setup.generator, setup.profile, k_ladder[ki],
        points[pi].z, points[pi].z, setup.boundary, setup.term_budget);
    ScanRow& row = table.rows[cell];
    row.point_id = points[pi].id;
    row.k = s.k;
    row.value = s.value;
    row.terms_used = s.terms_used;
    row.max_term_log = s.max_term_log;
  });
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ScanRow& a, const ScanRow& b) {
                     if (a.point_id != b.point_id) return a.point_id < b.point_id;
                     return a.k < b.k;
                   });
  return table;
}

inline ScanTable offdiagonal_scan(const ScanSetup& setup,
                                  const std::vector<NamedPair>& pairs,
                                  const std::vector<double>& k_ladder,
                                  int jobs = 1) {
  if (pairs.empty()) throw ConfigError("off-diagonal scan needs pairs");
  detail::check_ladder(k_ladder);
  ScanTable table;
  table.rows.resize(pairs.size() * k_ladder.size());
  parallel_for(table.rows.size(), jobs, [&](std::size_t cell) {
    const std::size_t pi = cell / k_ladder.size();
    const std::size_t ki = cell % k_ladder.size();
    const KernelSample s = kernel_eval_streaming(
        setup.domain, setup.generator, setup.profile, k_ladder[ki],
        pairs[pi].z, pairs[pi].w, setup.boundary, setup.term_budget);
    ScanRow& row = table.rows[cell];
    row.point_id = pairs[pi].id;
    row.k = s.k;
    row.value = s.value;
    row.terms_used = s.terms_used;
    row.max_term_log = s.max_term_log;
  });
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ScanRow& a, const ScanRow& b) {
                     if (a.point_id != b.point_id) return a.point_id < b.point_id;
                     return a.k < b.k;
                   });
  return table;
}

}  // namespace speclab
