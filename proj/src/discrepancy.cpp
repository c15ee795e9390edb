#include "gqrs/designs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gqrs::designs {

double local_discrepancy(const PointSet& ps, std::span<const double> a) {
  require(a.size() == ps.k(), ErrorKind::DimensionMismatch, "local_discrepancy: corner dimension mismatch");
  double volume = 1.0;
  for (double aj : a) {
    require(aj >= 0.0 && aj <= 1.0, ErrorKind::Domain, "local_discrepancy: corner outside [0,1]^k");
    volume *= aj;
  }
  std::size_t inside = 0;
  for (std::size_t i = 0; i < ps.n(); ++i) {
    bool in = true;
    for (std::size_t j = 0; j < ps.k() && in; ++j) in = ps(i, j) < a[j];
    inside += in ? 1 : 0;
  }
  const double frac = ps.n() == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(ps.n());
  return std::abs(frac - volume);
}

double star_discrepancy(const PointSet& ps) {
  const std::size_t n = ps.n();
  const std::size_t k = ps.k();
  require(n <= kMaxExactDiscrepancyPoints && k <= kMaxExactDiscrepancyDim, ErrorKind::Infeasible,
          "star_discrepancy: exact enumeration limited to n <= " + std::to_string(kMaxExactDiscrepancyPoints) +
              " and k <= " + std::to_string(kMaxExactDiscrepancyDim) +
              "; probe with local_discrepancy instead");
  if (n == 0 || k == 0) return 0.0;

  // Critical grid: distinct coordinates per dimension plus the upper face 1.
  std::vector<std::vector<double>> grid(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& g = grid[j];
    g.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) g.push_back(ps(i, j));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    g.push_back(1.0);
  }

  // The last dimension is swept with cumulative histograms over its grid.
  const std::size_t last = k - 1;
  const auto& sweep = grid[last];
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i)
    rank[i] = static_cast<std::size_t>(std::lower_bound(sweep.begin(), sweep.end(), ps(i, last)) - sweep.begin());

  const double nd = static_cast<double>(n);
  std::vector<std::size_t> open_hist(sweep.size()), closed_hist(sweep.size());
  std::vector<std::size_t> idx(last, 0);
  double worst = 0.0;
  while (true) {
    double outer_volume = 1.0;
    for (std::size_t j = 0; j < last; ++j) outer_volume *= grid[j][idx[j]];

    std::fill(open_hist.begin(), open_hist.end(), 0);
    std::fill(closed_hist.begin(), closed_hist.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      bool open = true, closed = true;
      for (std::size_t j = 0; j < last; ++j) {
        const double v = ps(i, j), a = grid[j][idx[j]];
        open = open && v < a;
        closed = closed && v <= a;
      }
      if (open) ++open_hist[rank[i]];
      if (closed) ++closed_hist[rank[i]];
    }

    std::size_t open_count = 0, closed_count = 0;
    for (std::size_t r = 0; r < sweep.size(); ++r) {
      closed_count += closed_hist[r];
      const double volume = outer_volume * sweep[r];
      worst = std::max(worst, volume - static_cast<double>(open_count) / nd);
      worst = std::max(worst, static_cast<double>(closed_count) / nd - volume);
      open_count += open_hist[r];
    }

    std::size_t j = 0;
    while (j < last && ++idx[j] == grid[j].size()) idx[j++] = 0;
    if (j == last) break;
  }
  return worst;
}

}  // namespace gqrs::designs
