#pragma once

// Shared error types, numeric helpers, and small utilities used across the
// library. Everything lives in namespace speclab.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace speclab {

using Complex = std::complex<double>;

// Base class for all library errors. Each condition named in a function
// contract gets its own type so callers (and the CLI) can map failures to
// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define SPECLAB_DEFINE_ERROR(NAME)                              \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& msg) : Error(msg) {}       \
  }

SPECLAB_DEFINE_ERROR(DegenerateGradient);
SPECLAB_DEFINE_ERROR(NotOnBoundary);
SPECLAB_DEFINE_ERROR(DimensionTooSmall);
SPECLAB_DEFINE_ERROR(NotTangent);
SPECLAB_DEFINE_ERROR(NonPositiveAlpha);
SPECLAB_DEFINE_ERROR(CapacityExceeded);
SPECLAB_DEFINE_ERROR(QuadratureBudgetExceeded);
SPECLAB_DEFINE_ERROR(ResolventIllConditioned);
SPECLAB_DEFINE_ERROR(NearSingular);
SPECLAB_DEFINE_ERROR(UnstableSummation);
SPECLAB_DEFINE_ERROR(NonPositiveValue);
SPECLAB_DEFINE_ERROR(DepthTooLarge);
SPECLAB_DEFINE_ERROR(ConfigError);

#undef SPECLAB_DEFINE_ERROR

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// pi^n without pow() drift for the small n we use.
inline double pi_pow(int n) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= kPi;
  return p;
}

// Shortest-width decimal that round-trips a double; used by every CSV and
// report writer so that outputs are byte-stable across runs.
inline std::string format_double(double x) {
  char buf[64];
  const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

// FNV-1a over a string; used to fingerprint configs inside reports.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Runs body(i) for i in [0, count). With jobs <= 1 this is a plain loop.
// With jobs > 1 the index set is striped across threads; every iteration
// writes only to its own slot, so results do not depend on the thread count.
// The first exception thrown by any iteration is rethrown on the caller.
inline void parallel_for(std::size_t count, int jobs,
                         const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const int nthreads = static_cast<int>(
      std::min<std::size_t>(count, static_cast<std::size_t>(jobs)));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t i = static_cast<std::size_t>(t); i < count;
             i += static_cast<std::size_t>(nthreads)) {
          body(i);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Binomial coefficient as double via lgamma; exact for the ranges we need
// (arguments stay far below 2^53 in all index-counting uses).
inline double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                  std::lgamma(static_cast<double>(k) + 1.0) -
                  std::lgamma(static_cast<double>(n - k) + 1.0));
}

// Integer binomial with overflow-free evaluation for counts that must be
// exact (index-set sizes, per-degree dimensions).
inline std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r / i * (n - k + i) + r % i * (n - k + i) / i;
  }
  return r;
}

}  // namespace speclab
