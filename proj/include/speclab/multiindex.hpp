#pragma once

// Multi-indices alpha in Z_{>=0}^n with graded lexicographic enumeration:
// indices are ordered by total degree, and within a degree the first
// component decreases first, so for n = 2 the order starts
// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "speclab/common.hpp"

namespace speclab {

using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

// Number of alpha with |alpha| = d in n variables: C(d+n-1, n-1).
inline std::uint64_t count_multiindices_of_degree(int n, int d) {
  if (n <= 0 || d < 0) return 0;
  return binomial_u64(static_cast<std::uint64_t>(d + n - 1),
                      static_cast<std::uint64_t>(n - 1));
}

// Number of alpha with |alpha| <= max_degree: C(max_degree+n, n).
inline std::uint64_t count_multiindices_up_to(int n, int max_degree) {
  if (n <= 0 || max_degree < 0) return 0;
  return binomial_u64(static_cast<std::uint64_t>(max_degree + n),
                      static_cast<std::uint64_t>(n));
}

namespace detail {

// Visits indices of exactly degree d in graded-lex order by filling
// positions left to right, largest leading entry first.
inline void visit_degree(MultiIndex& alpha, std::size_t pos, int remaining,
                         const std::function<void(const MultiIndex&)>& fn) {
  if (pos + 1 == alpha.size()) {
    alpha[pos] = remaining;
    fn(alpha);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    alpha[pos] = a;
    visit_degree(alpha, pos + 1, remaining - a, fn);
  }
}

}  // namespace detail

// Streams every alpha with min_degree <= |alpha| <= max_degree in graded-lex
// order without materializing the index set. This is the workhorse for
// kernel scans, where the index count at large k exceeds any sensible
// in-memory budget.
inline void for_each_multiindex(
    int n, int min_degree, int max_degree,
    const std::function<void(const MultiIndex&)>& fn) {
  if (n <= 0) throw DimensionTooSmall("multi-index dimension must be >= 1");
  MultiIndex alpha(static_cast<std::size_t>(n), 0);
  for (int d = std::max(min_degree, 0); d <= max_degree; ++d) {
    detail::visit_degree(alpha, 0, d, fn);
  }
}

// Materializes all alpha with |alpha| <= max_degree in graded-lex order.
// Throws CapacityExceeded before allocating if the count would exceed the
// budget (default 1e7 indices).
inline std::vector<MultiIndex> enumerate_multiindices(
    int n, int max_degree, std::uint64_t budget = 10000000ull) {
  if (n <= 0) throw DimensionTooSmall("multi-index dimension must be >= 1");
  if (max_degree < 0) return {};
  const std::uint64_t total = count_multiindices_up_to(n, max_degree);
  if (total > budget) {
    throw CapacityExceeded("index set of size " + std::to_string(total) +
                           " exceeds budget " + std::to_string(budget));
  }
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(total));
  for_each_multiindex(n, 0, max_degree,
                      [&](const MultiIndex& a) { out.push_back(a); });
  return out;
}

}  // namespace speclab
