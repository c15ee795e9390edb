#pragma once

#include "gqrs/common.hpp"
#include "gqrs/copulas.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace gqrs::gof {

/// C_n(u) = (1/n) #{i : u_i <= u componentwise}.
class EmpiricalCopula {
 public:
  explicit EmpiricalCopula(Matrix sample);

  std::size_t n() const { return static_cast<std::size_t>(sample_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(sample_.cols()); }
  const Matrix& sample() const { return sample_; }

  double operator()(std::span<const double> u) const;

 private:
  Matrix sample_;
};

double empirical_copula_eval(const EmpiricalCopula& ec, std::span<const double> u);

/// C_n evaluated at each of its own sample points. Uses a sort + Fenwick
/// sweep for d = 2 and direct counting otherwise.
std::vector<double> empirical_copula_at_sample(const Matrix& sample);

/// Direct O(n^2 d) counting; reference for the fast path.
std::vector<double> empirical_copula_at_sample_naive(const Matrix& sample);

/// S_n = sum_i (C_n(u_i) - C(u_i))^2, i.e. n * integral of (C_n - C)^2 dC_n.
double cvm_one_sample(const Matrix& sample, const copulas::CopulaSpec& spec);

/// Sqrt divides by sqrt(1/n + 1/N); Linear divides by (1/n + 1/N).
enum class TwoSampleScaling { Sqrt, Linear };

TwoSampleScaling parse_scaling(std::string_view name);
std::string_view to_string(TwoSampleScaling s);

/// Unscaled integral of (C_a - C_b)^2 over [0,1]^d in closed form.
double two_sample_integral(const Matrix& a, const Matrix& b);

/// S_{N,n}: the integral above multiplied by the chosen scaling factor.
/// Exactly symmetric in (a, b).
double cvm_two_sample(const Matrix& a, const Matrix& b, TwoSampleScaling scaling = TwoSampleScaling::Sqrt);

}  // namespace gqrs::gof
