#include "gqrs/gofstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gqrs::gof {

EmpiricalCopula::EmpiricalCopula(Matrix sample) : sample_(std::move(sample)) {
  require(sample_.rows() >= 1 && sample_.cols() >= 1, ErrorKind::InvalidArgument, "EmpiricalCopula: empty sample");
}

double EmpiricalCopula::operator()(std::span<const double> u) const {
  require(u.size() == dim(), ErrorKind::DimensionMismatch, "empirical copula: point dimension mismatch");
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < sample_.rows(); ++i) {
    bool below = true;
    for (Eigen::Index j = 0; j < sample_.cols() && below; ++j) below = sample_(i, j) <= u[static_cast<std::size_t>(j)];
    count += below ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(n());
}

double empirical_copula_eval(const EmpiricalCopula& ec, std::span<const double> u) { return ec(u); }

std::vector<double> empirical_copula_at_sample_naive(const Matrix& sample) {
  const auto n = sample.rows();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (Eigen::Index m = 0; m < n; ++m) count += (sample.row(m).array() <= sample.row(i).array()).all() ? 1 : 0;
    out[static_cast<std::size_t>(i)] = static_cast<double>(count) / static_cast<double>(n);
  }
  return out;
}

namespace {

// Dominance counts in two dimensions: sort by x, insert y-ranks into a
// Fenwick tree one x-group at a time, then query ranks <= y_i.
std::vector<double> empirical_copula_at_sample_2d(const Matrix& sample) {
  const auto n = static_cast<std::size_t>(sample.rows());
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = sample(static_cast<Eigen::Index>(i), 1);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  auto y_rank = [&](double y) {
    return static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), y) - ys.begin()) + 1;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample(static_cast<Eigen::Index>(a), 0) < sample(static_cast<Eigen::Index>(b), 0);
  });

  std::vector<std::size_t> tree(ys.size() + 1, 0);
  auto add = [&](std::size_t pos) {
    for (; pos < tree.size(); pos += pos & (~pos + 1)) ++tree[pos];
  };
  auto prefix = [&](std::size_t pos) {
    std::size_t s = 0;
    for (; pos > 0; pos -= pos & (~pos + 1)) s += tree[pos];
    return s;
  };

  std::vector<double> out(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    const double x = sample(static_cast<Eigen::Index>(order[start]), 0);
    while (end < n && sample(static_cast<Eigen::Index>(order[end]), 0) == x) ++end;
    for (std::size_t g = start; g < end; ++g) add(y_rank(sample(static_cast<Eigen::Index>(order[g]), 1)));
    for (std::size_t g = start; g < end; ++g) {
      const std::size_t i = order[g];
      out[i] = static_cast<double>(prefix(y_rank(sample(static_cast<Eigen::Index>(i), 1)))) / static_cast<double>(n);
    }
    start = end;
  }
  return out;
}

}  // namespace

std::vector<double> empirical_copula_at_sample(const Matrix& sample) {
  require(sample.rows() >= 1, ErrorKind::InvalidArgument, "empirical copula: empty sample");
  if (sample.cols() == 2) return empirical_copula_at_sample_2d(sample);
  return empirical_copula_at_sample_naive(sample);
}

double cvm_one_sample(const Matrix& sample, const copulas::CopulaSpec& spec) {
  require(static_cast<std::size_t>(sample.cols()) == spec.dim(), ErrorKind::DimensionMismatch,
          "cvm_one_sample: sample dimension differs from copula dimension");
  const auto cn = empirical_copula_at_sample(sample);
  double total = 0.0;
  std::vector<double> u(static_cast<std::size_t>(sample.cols()));
  for (Eigen::Index i = 0; i < sample.rows(); ++i) {
    for (Eigen::Index j = 0; j < sample.cols(); ++j) u[static_cast<std::size_t>(j)] = sample(i, j);
    const double diff = cn[static_cast<std::size_t>(i)] - copulas::copula_cdf(spec, u);
    total += diff * diff;
  }
  return total;
}

TwoSampleScaling parse_scaling(std::string_view name) {
  if (name == "sqrt") return TwoSampleScaling::Sqrt;
  if (name == "linear") return TwoSampleScaling::Linear;
  throw Error(ErrorKind::InvalidArgument, "unknown scaling '" + std::string(name) + "'");
}

std::string_view to_string(TwoSampleScaling s) { return s == TwoSampleScaling::Sqrt ? "sqrt" : "linear"; }

namespace {

// sum_i sum_j prod_k (1 - max(x_ik, y_jk)), accumulated row by row in a fixed order.
double cross_sum(const Matrix& x, const Matrix& y) {
  const auto d = x.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < d; ++k) prod *= 1.0 - std::max(x(i, k), y(j, k));
      row += prod;
    }
    total += row;
  }
  return total;
}

// Canonical order so that swapping the arguments reproduces the same bits.
bool precedes(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

double two_sample_integral(const Matrix& a, const Matrix& b) {
  require(a.rows() >= 1 && b.rows() >= 1, ErrorKind::InvalidArgument, "cvm_two_sample: empty sample");
  require(a.cols() == b.cols(), ErrorKind::DimensionMismatch, "cvm_two_sample: samples differ in dimension");
  const Matrix& x = precedes(b, a) ? b : a;
  const Matrix& y = precedes(b, a) ? a : b;
  const auto n = static_cast<double>(x.rows()), m = static_cast<double>(y.rows());
  const double value = cross_sum(x, x) / (n * n) - 2.0 * cross_sum(x, y) / (n * m) + cross_sum(y, y) / (m * m);
  return std::max(value, 0.0);
}

double cvm_two_sample(const Matrix& a, const Matrix& b, TwoSampleScaling scaling) {
  const double integral = two_sample_integral(a, b);
  const double h = 1.0 / static_cast<double>(a.rows()) + 1.0 / static_cast<double>(b.rows());
  return scaling == TwoSampleScaling::Sqrt ? integral / std::sqrt(h) : integral / h;
}

}  // namespace gqrs::gof
