#include "gqrs/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace gqrs::copulas {

namespace {

constexpr double kBracketLow = 1e-14;
constexpr double kBracketHigh = 1.0 - 1e-14;
constexpr int kMaxBisection = 200;

double clamp_open(double x) { return std::clamp(x, kOpenUnitLow, kOpenUnitHigh); }

// log |psi^{(order)}(t)| for the Gumbel generator psi(t) = exp(-t^alpha), alpha = 1/theta.
double gumbel_log_abs_derivative(double t, double alpha, std::size_t order) {
  const double log_t = std::log(t);
  const double t_alpha = std::exp(alpha * log_t);
  switch (order) {
    case 0: return -t_alpha;
    case 1: return std::log(alpha) + (alpha - 1.0) * log_t - t_alpha;
    case 2: return std::log(alpha) + (alpha - 2.0) * log_t - t_alpha + std::log(alpha * t_alpha + 1.0 - alpha);
    default: break;
  }
  throw Error(ErrorKind::DimensionUnsupported, "Gumbel generator derivatives implemented up to order 2");
}

double gumbel_inverse_generator(double u, double theta) { return std::pow(-std::log(u), theta); }

double gumbel_conditional(const CopulaSpec& spec, std::span<const double> prefix, double uj) {
  const double theta = spec.theta();
  const double alpha = 1.0 / theta;
  double s_prev = 0.0;
  for (double u : prefix) s_prev += gumbel_inverse_generator(u, theta);
  const double s_next = s_prev + gumbel_inverse_generator(uj, theta);
  const std::size_t order = prefix.size();
  return std::exp(gumbel_log_abs_derivative(s_next, alpha, order) - gumbel_log_abs_derivative(s_prev, alpha, order));
}

double invert_by_bisection(const CopulaSpec& spec, std::span<const double> prefix, double v) {
  auto f = [&](double u) {
    const double value = conditional_cdf(spec, prefix, u);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "cdm_transform: non-finite conditional CDF at u=" << u << " (v=" << v << ", coordinate "
          << prefix.size() << ")";
      throw Error(ErrorKind::Convergence, msg.str());
    }
    return value;
  };
  double lo = kBracketLow, hi = kBracketHigh;
  if (v <= f(lo)) return lo;
  if (v >= f(hi)) return hi;
  int iter = 0;
  for (; iter < kMaxBisection; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < v ? lo : hi) = mid;
  }
  if (hi - lo > 1e-10) {
    std::ostringstream msg;
    msg << "cdm_transform: bisection did not converge after " << iter << " iterations; bracket [" << lo << ", "
        << hi << "], v=" << v;
    throw Error(ErrorKind::Convergence, msg.str());
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Clayton: return "clayton";
    case Family::Gumbel: return "gumbel";
    case Family::MarshallOlkin: return "mo";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "clayton") return Family::Clayton;
  if (name == "gumbel") return Family::Gumbel;
  if (name == "mo" || name == "marshall-olkin") return Family::MarshallOlkin;
  throw Error(ErrorKind::InvalidArgument, "unknown copula family '" + std::string(name) + "'");
}

CopulaSpec CopulaSpec::clayton(double theta, std::size_t d) {
  require(std::isfinite(theta) && theta > 0.0, ErrorKind::InvalidArgument, "Clayton copula needs theta > 0");
  require(d >= 2, ErrorKind::InvalidArgument, "copula dimension must be at least 2");
  return CopulaSpec(Family::Clayton, theta, 0.0, d);
}

CopulaSpec CopulaSpec::gumbel(double theta, std::size_t d) {
  require(std::isfinite(theta) && theta >= 1.0, ErrorKind::InvalidArgument, "Gumbel copula needs theta >= 1");
  require(d >= 2, ErrorKind::InvalidArgument, "copula dimension must be at least 2");
  return CopulaSpec(Family::Gumbel, theta, 0.0, d);
}

CopulaSpec CopulaSpec::marshall_olkin(double alpha1, double alpha2) {
  require(alpha1 >= 0.0 && alpha1 <= 1.0 && alpha2 >= 0.0 && alpha2 <= 1.0, ErrorKind::InvalidArgument,
          "Marshall-Olkin copula needs alpha1, alpha2 in [0,1]");
  return CopulaSpec(Family::MarshallOlkin, alpha1, alpha2, 2);
}

double copula_cdf(const CopulaSpec& spec, std::span<const double> u) {
  require(u.size() == spec.dim(), ErrorKind::DimensionMismatch, "copula_cdf: point dimension mismatch");
  for (double x : u) {
    require(x >= 0.0 && x <= 1.0, ErrorKind::Domain, "copula_cdf: point outside [0,1]^d");
    if (x == 0.0) return 0.0;
  }
  switch (spec.family()) {
    case Family::Clayton: {
      const double theta = spec.theta();
      double sum = 0.0;
      for (double x : u) sum += std::pow(x, -theta) - 1.0;
      return std::pow(1.0 + sum, -1.0 / theta);
    }
    case Family::Gumbel: {
      const double theta = spec.theta();
      double sum = 0.0;
      for (double x : u) sum += gumbel_inverse_generator(x, theta);
      return std::exp(-std::pow(sum, 1.0 / theta));
    }
    case Family::MarshallOlkin: {
      const double a1 = spec.alpha1(), a2 = spec.alpha2();
      return std::min(std::pow(u[0], 1.0 - a1) * u[1], u[0] * std::pow(u[1], 1.0 - a2));
    }
  }
  return 0.0;
}

double theta_from_tau(Family family, double tau) {
  switch (family) {
    case Family::Clayton:
      require(tau > 0.0 && tau < 1.0, ErrorKind::Domain, "Clayton tau must lie in (0,1)");
      return 2.0 * tau / (1.0 - tau);
    case Family::Gumbel:
      require(tau >= 0.0 && tau < 1.0, ErrorKind::Domain, "Gumbel tau must lie in [0,1)");
      return 1.0 / (1.0 - tau);
    case Family::MarshallOlkin: break;
  }
  throw Error(ErrorKind::InvalidArgument, "theta_from_tau: family has no single tau parameter");
}

double conditional_cdf(const CopulaSpec& spec, std::span<const double> prefix, double uj) {
  require(prefix.size() < spec.dim(), ErrorKind::DimensionMismatch, "conditional_cdf: prefix too long");
  if (prefix.empty()) return uj;
  switch (spec.family()) {
    case Family::Clayton: {
      const double theta = spec.theta();
      const auto j = static_cast<double>(prefix.size());
      double t = 1.0;
      for (double u : prefix) t += std::pow(u, -theta) - 1.0;
      return std::pow((t + std::pow(uj, -theta) - 1.0) / t, -(1.0 / theta + j));
    }
    case Family::Gumbel:
      require(spec.dim() <= kMaxGumbelCdmDimension, ErrorKind::DimensionUnsupported,
              "Gumbel conditional distribution supported for d <= 3");
      return gumbel_conditional(spec, prefix, uj);
    case Family::MarshallOlkin: {
      const double a1 = spec.alpha1(), a2 = spec.alpha2();
      const double u1 = prefix[0];
      if (a2 == 0.0) return uj;
      if (uj < std::pow(u1, a1 / a2)) return (1.0 - a1) * std::pow(u1, -a1) * uj;
      return std::pow(uj, 1.0 - a2);
    }
  }
  return 0.0;
}

std::vector<double> cdm_transform(const CopulaSpec& spec, std::span<const double> v) {
  require(v.size() == spec.dim(), ErrorKind::DimensionMismatch, "cdm_transform: point dimension mismatch");
  for (double x : v) require(x > 0.0 && x < 1.0, ErrorKind::Domain, "cdm_transform: point outside (0,1)^d");
  const std::size_t d = spec.dim();
  std::vector<double> u(d);
  u[0] = v[0];
  switch (spec.family()) {
    case Family::Clayton: {
      const double theta = spec.theta();
      double t = std::pow(u[0], -theta);
      for (std::size_t j = 1; j < d; ++j) {
        const double exponent = -theta / (1.0 + theta * static_cast<double>(j));
        u[j] = std::pow(1.0 + t * (std::pow(v[j], exponent) - 1.0), -1.0 / theta);
        t += std::pow(u[j], -theta) - 1.0;
      }
      break;
    }
    case Family::Gumbel: {
      require(d <= kMaxGumbelCdmDimension, ErrorKind::DimensionUnsupported,
              "cdm_transform: Gumbel supported for d <= 3 (got " + std::to_string(d) + ")");
      for (std::size_t j = 1; j < d; ++j)
        u[j] = invert_by_bisection(spec, std::span<const double>(u.data(), j), v[j]);
      break;
    }
    case Family::MarshallOlkin: {
      const double a1 = spec.alpha1(), a2 = spec.alpha2();
      if (a2 == 0.0) {
        u[1] = v[1];
        break;
      }
      const double atom = std::pow(u[0], a1 / a2);
      const double upper = std::pow(u[0], a1 / a2 - a1);
      if (v[1] < (1.0 - a1) * upper) {
        u[1] = v[1] * std::pow(u[0], a1) / (1.0 - a1);
      } else if (v[1] >= upper) {
        u[1] = std::pow(v[1], 1.0 / (1.0 - a2));
      } else {
        u[1] = atom;
      }
      break;
    }
  }
  return u;
}

Matrix pseudo_observations(const Matrix& data) {
  const auto rows = data.rows();
  require(rows >= 2, ErrorKind::InvalidArgument, "pseudo_observations: need at least 2 observations");
  require(data.allFinite(), ErrorKind::NonFinite, "pseudo_observations: data contains non-finite values");
  Matrix out(rows, data.cols());
  const double denom = static_cast<double>(rows + 1);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return data(a, j) < data(b, j); });
    for (Eigen::Index r = 0; r < rows; ++r) out(order[static_cast<std::size_t>(r)], j) = static_cast<double>(r + 1) / denom;
  }
  return out;
}

Matrix sample_cdm(const CopulaSpec& spec, const designs::PointSet& source) {
  const std::size_t d = spec.dim();
  require(source.k() >= d, ErrorKind::DimensionMismatch, "sample_cdm: source dimension smaller than copula dimension");
  Matrix out(static_cast<Eigen::Index>(source.n()), static_cast<Eigen::Index>(d));
  std::vector<double> v(d);
  for (std::size_t i = 0; i < source.n(); ++i) {
    for (std::size_t j = 0; j < d; ++j) v[j] = clamp_open(source(i, j));
    const auto u = cdm_transform(spec, v);
    for (std::size_t j = 0; j < d; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u[j];
  }
  return out;
}

Matrix sample_cdm(const CopulaSpec& spec, std::size_t n, CounterRng& rng) {
  const std::size_t d = spec.dim();
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<double> v(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) v[j] = rng.uniform_open();
    const auto u = cdm_transform(spec, v);
    for (std::size_t j = 0; j < d; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u[j];
  }
  return out;
}

namespace {

std::uint64_t tied_pairs(const std::vector<double>& sorted) {
  std::uint64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Stable merge sort counting strict inversions.
std::uint64_t count_inversions(std::vector<double>& a, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(a, buf, lo, mid) + count_inversions(a, buf, mid, hi);
  std::size_t i = lo, j = mid, o = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      inv += mid - i;
      buf[o++] = a[j++];
    } else {
      buf[o++] = a[i++];
    }
  }
  while (i < mid) buf[o++] = a[i++];
  while (j < hi) buf[o++] = a[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            a.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

double kendall_tau_pair(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch, "kendall_tau: column lengths differ");
  const std::size_t n = x.size();
  require(n >= 2, ErrorKind::InvalidArgument, "kendall_tau: need at least 2 samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::uint64_t ties_x = tied_pairs(xs);
  std::uint64_t ties_xy = 0, run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      ties_xy += run * (run - 1) / 2;
      run = 1;
    }
  }
  std::vector<double> buf(n);
  const std::uint64_t discordant = count_inversions(ys, buf, 0, n);
  const std::uint64_t ties_y = tied_pairs(ys);  // ys is sorted now

  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const auto numerator = static_cast<double>(pairs) - static_cast<double>(ties_x) - static_cast<double>(ties_y) +
                         static_cast<double>(ties_xy) - 2.0 * static_cast<double>(discordant);
  return numerator / static_cast<double>(pairs);
}

double kendall_tau_empirical(const Matrix& samples) {
  const auto d = samples.cols();
  require(samples.rows() >= 2, ErrorKind::InvalidArgument, "kendall_tau_empirical: need at least 2 samples");
  require(d >= 2, ErrorKind::InvalidArgument, "kendall_tau_empirical: need at least 2 columns");
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    cols[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index i = 0; i < samples.rows(); ++i) cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = samples(i, j);
  }
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < cols.size(); ++a)
    for (std::size_t b = a + 1; b < cols.size(); ++b) {
      total += kendall_tau_pair(cols[a], cols[b]);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

}  // namespace gqrs::copulas
