#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include "gqrs/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// Phi^-1(p) for p <= 0.5 by bisection on the erfc-based CDF.
inline double normal_quantile_lower(double p) {
  double lo = -40.0, hi = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Phi^-1(p) using the lower tail for p > 0.5 (1 - p is exact there).
inline double normal_quantile(double p) { return p <= 0.5 ? normal_quantile_lower(p) : -normal_quantile_lower(1.0 - p); }

/// Kendall tau-a by direct enumeration of all pairs.
inline double kendall_tau_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long long s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = (x[i] - x[j]) * (y[i] - y[j]);
      s += a > 0 ? 1 : (a < 0 ? -1 : 0);
    }
  return static_cast<double>(s) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Midpoint-rule value of the integral of (C_a - C_b)^2 over [0,1]^d, d in {2,3},
/// with m cells per axis. Each empirical copula is tabulated slice by slice
/// from cumulative 2-d histograms.
inline double grid_integral(const gqrs::Matrix& a, const gqrs::Matrix& b, int m) {
  const int d = static_cast<int>(a.cols());
  const int slices = d == 3 ? m : 1;
  auto cell = [m](double v) {
    // grid midpoint index c satisfies v <= (c + 0.5)/m  <=>  c >= ceil(v*m - 0.5)
    const int c = static_cast<int>(std::ceil(v * m - 0.5));
    return std::clamp(c, 0, m);
  };
  auto bins = [&](const gqrs::Matrix& s) {
    // first slice index at which each point is counted, plus its 2-d cell
    std::vector<std::vector<std::pair<int, int>>> by_slice(static_cast<std::size_t>(slices) + 1);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const int z = d == 3 ? cell(s(i, 2)) : 0;
      by_slice[static_cast<std::size_t>(z)].push_back({cell(s(i, 0)), cell(s(i, 1))});
    }
    return by_slice;
  };
  const auto ba = bins(a), bb = bins(b);
  const double wa = 1.0 / static_cast<double>(a.rows()), wb = 1.0 / static_cast<double>(b.rows());
  std::vector<double> hist(static_cast<std::size_t>((m + 1) * (m + 1)), 0.0);
  double total = 0.0;
  for (int z = 0; z < slices; ++z) {
    for (auto [x, y] : ba[static_cast<std::size_t>(z)]) hist[static_cast<std::size_t>(x * (m + 1) + y)] += wa;
    for (auto [x, y] : bb[static_cast<std::size_t>(z)]) hist[static_cast<std::size_t>(x * (m + 1) + y)] -= wb;
    // 2-d prefix sum gives C_a - C_b at every midpoint of this slice
    std::vector<double> col(static_cast<std::size_t>(m), 0.0);
    for (int x = 0; x < m; ++x) {
      double run = 0.0;
      for (int y = 0; y < m; ++y) {
        run += hist[static_cast<std::size_t>(x * (m + 1) + y)];
        col[static_cast<std::size_t>(y)] += run;
        total += col[static_cast<std::size_t>(y)] * col[static_cast<std::size_t>(y)];
      }
    }
  }
  return total / std::pow(static_cast<double>(m), d);
}

}  // namespace oracle
