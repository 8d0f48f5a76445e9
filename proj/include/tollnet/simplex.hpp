#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tollnet/errors.hpp"

namespace tollnet::lp {

enum class Status { optimal, unbounded, iteration_limit };

struct Result {
  Status status = Status::optimal;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// maximize c'x  subject to  A x <= b, x >= 0, with b >= 0 so the origin is
/// a feasible basis. A is row-major (rows x cols). Dense dictionary simplex
/// with Bland's rule, so it terminates on degenerate problems.
inline Result maximize(std::span<const double> c, std::span<const double> A, std::span<const double> b,
                       std::size_t max_pivots = 100000) {
  const std::size_t n = c.size();
  const std::size_t m = b.size();
  if (A.size() != m * n) throw NumericError("lp: constraint matrix has wrong shape");
  for (double v : b)
    if (!(v >= 0.0)) throw NumericError("lp: right-hand side must be non-negative");

  double scale = 1.0;
  for (double v : A) scale = std::max(scale, std::abs(v));
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double eps = 1e-12 * scale;

  std::vector<double> T(A.begin(), A.end());  // basic_i = rhs_i - sum_j T(i,j) nonbasic_j
  std::vector<double> rhs(b.begin(), b.end());
  std::vector<double> d(c.begin(), c.end());  // objective = z + sum_j d_j nonbasic_j
  double z = 0.0;
  std::vector<std::size_t> nonbasic(n);
  std::vector<std::size_t> basic(m);
  for (std::size_t j = 0; j < n; ++j) nonbasic[j] = j;
  for (std::size_t i = 0; i < m; ++i) basic[i] = n + i;

  Result res;
  for (;;) {
    std::size_t s = n;
    for (std::size_t j = 0; j < n; ++j)
      if (d[j] > eps && (s == n || nonbasic[j] < nonbasic[s])) s = j;
    if (s == n) break;

    std::size_t r = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = T[i * n + s];
      if (a <= eps) continue;
      const double ratio = rhs[i] / a;
      if (ratio < best || (r != m && ratio == best && basic[i] < basic[r])) {
        best = ratio;
        r = i;
      }
    }
    if (r == m) {
      res.status = Status::unbounded;
      return res;
    }
    if (++res.pivots > max_pivots) {
      res.status = Status::iteration_limit;
      return res;
    }

    const double piv = T[r * n + s];
    double* row_r = &T[r * n];
    rhs[r] /= piv;
    for (std::size_t j = 0; j < n; ++j) row_r[j] = (j == s) ? 1.0 / piv : row_r[j] / piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      double* row_i = &T[i * n];
      const double f = row_i[s];
      if (f == 0.0) continue;
      rhs[i] = std::max(0.0, rhs[i] - f * rhs[r]);
      for (std::size_t j = 0; j < n; ++j) row_i[j] = (j == s) ? -f * row_r[j] : row_i[j] - f * row_r[j];
    }
    const double ds = d[s];
    z += ds * rhs[r];
    for (std::size_t j = 0; j < n; ++j) d[j] = (j == s) ? -ds * row_r[j] : d[j] - ds * row_r[j];
    std::swap(basic[r], nonbasic[s]);
  }

  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basic[i] < n) res.x[basic[i]] = rhs[i];
  res.objective = z;
  return res;
}

}  // namespace tollnet::lp
