#pragma once

// Compactly supported smooth cutoff profiles
//   chi(t) = amplitude * exp(-1 / (1 - u^2)),  u = (t - center) / radius,
// supported exactly on [center - radius, center + radius]. The support must
// lie in (0, +infinity). Derivatives of any order are produced by power
// series composition, not finite differences, so they are accurate enough to
// drive almost-analytic extensions of high order.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "speclab/common.hpp"

namespace speclab {

struct ChiProfile {
  double center = 1.5;
  double radius = 0.5;
  double amplitude = 1.0;

  ChiProfile() = default;
  ChiProfile(double c, double r, double amp = 1.0)
      : center(c), radius(r), amplitude(amp) {
    validate();
  }

  void validate() const {
    if (!(radius > 0.0)) {
      throw ConfigError("chi radius must be positive");
    }
    if (!(center - radius > 0.0)) {
      throw ConfigError(
          "chi support [" + format_double(center - radius) + ", " +
          format_double(center + radius) +
          "] must lie in (0, +infinity): require center - radius > 0");
    }
    if (!(std::isfinite(amplitude)) || amplitude == 0.0) {
      throw ConfigError("chi amplitude must be finite and nonzero");
    }
  }

  double t_min() const { return center - radius; }
  double t_max() const { return center + radius; }

  // sup |chi| = |amplitude| * e^{-1}, attained at t = center.
  double sup_value() const { return std::abs(amplitude) * std::exp(-1.0); }

  double operator()(double t) const {
    const double u = (t - center) / radius;
    const double w = 1.0 - u * u;
    if (w <= 0.0) return 0.0;
    const double e = -1.0 / w;
    if (e < -745.0) return 0.0;
    return amplitude * std::exp(e);
  }

  // Taylor coefficients chi^{(r)}(t) / r! for r = 0..order, by composing the
  // series of u, 1-u^2, -1/(1-u^2), and exp at the point t. Outside the open
  // support all coefficients are exactly zero.
  std::vector<double> taylor(double t, int order) const {
    std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
    const double u0 = (t - center) / radius;
    const double w0 = 1.0 - u0 * u0;
    if (w0 <= 0.0) return out;
    const double v0 = -1.0 / w0;
    if (v0 < -745.0) return out;

    const std::size_t m = out.size();
    // w = 1 - u^2 has a quadratic series in (t - t0).
    std::vector<double> w(m, 0.0);
    w[0] = w0;
    if (m > 1) w[1] = -2.0 * u0 / radius;
    if (m > 2) w[2] = -1.0 / (radius * radius);

    // v = -1/w via the reciprocal recurrence sum_l w_l v_{m-l} = 0, m >= 1.
    std::vector<double> v(m, 0.0);
    v[0] = v0;
    for (std::size_t r = 1; r < m; ++r) {
      double s = 0.0;
      for (std::size_t l = 1; l <= std::min<std::size_t>(r, 2); ++l) {
        s += w[l] * v[r - l];
      }
      v[r] = -s / w0;
    }

    // E = amplitude * exp(v) via E' = E v'.
    out[0] = amplitude * std::exp(v0);
    for (std::size_t r = 1; r < m; ++r) {
      double s = 0.0;
      for (std::size_t l = 1; l <= r; ++l) {
        s += static_cast<double>(l) * v[l] * out[r - l];
      }
      out[r] = s / static_cast<double>(r);
    }
    return out;
  }

  // chi^{(r)}(t) as a plain derivative (r! times the Taylor coefficient).
  double derivative(double t, int r) const {
    const std::vector<double> a = taylor(t, r);
    double fact = 1.0;
    for (int i = 2; i <= r; ++i) fact *= static_cast<double>(i);
    return a[static_cast<std::size_t>(r)] * fact;
  }

  // The rescaled profile t -> chi(t / k) used at semiclassical parameter k.
  double scaled(double t, double k) const { return (*this)(t / k); }
};

}  // namespace speclab
