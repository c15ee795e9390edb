#pragma once

#include "gqrs/common.hpp"
#include "gqrs/designs.hpp"
#include "gqrs/rng.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gqrs::copulas {

enum class Family { Clayton, Gumbel, MarshallOlkin };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Parametric copula; Clayton/Gumbel use theta, Marshall-Olkin uses alpha1/alpha2.
class CopulaSpec {
 public:
  static CopulaSpec clayton(double theta, std::size_t d);
  static CopulaSpec gumbel(double theta, std::size_t d);
  static CopulaSpec marshall_olkin(double alpha1, double alpha2);

  Family family() const { return family_; }
  std::size_t dim() const { return d_; }
  double theta() const { return p1_; }
  double alpha1() const { return p1_; }
  double alpha2() const { return p2_; }

 private:
  CopulaSpec(Family f, double p1, double p2, std::size_t d) : family_(f), d_(d), p1_(p1), p2_(p2) {}

  Family family_;
  std::size_t d_;
  double p1_;
  double p2_;
};

double copula_cdf(const CopulaSpec& spec, std::span<const double> u);

/// Parameter giving the requested Kendall's tau (Clayton and Gumbel only).
double theta_from_tau(Family family, double tau);

/// Largest dimension supported by the Gumbel conditional distribution method.
inline constexpr std::size_t kMaxGumbelCdmDimension = 3;

/// Conditional CDF C(u_j | u_1..u_{j-1}) for j = prefix.size() (0-based index
/// of the coordinate being conditioned). For Marshall-Olkin this is the
/// right-continuous version, which jumps at the singular curve.
double conditional_cdf(const CopulaSpec& spec, std::span<const double> prefix, double uj);

/// Inverse Rosenblatt transform of v in (0,1)^d.
std::vector<double> cdm_transform(const CopulaSpec& spec, std::span<const double> v);

/// Rank-based pseudo-observations R_ij/(N+1); ties take input order.
Matrix pseudo_observations(const Matrix& data);

/// Row-wise cdm_transform of the first d coordinates of each source point.
/// Coordinates outside (0,1) are clamped to [2^-53, 1-2^-53].
Matrix sample_cdm(const CopulaSpec& spec, const designs::PointSet& source);
Matrix sample_cdm(const CopulaSpec& spec, std::size_t n, CounterRng& rng);

/// Kendall's tau-a for one column pair (O(n log n), Knight's algorithm).
double kendall_tau_pair(std::span<const double> x, std::span<const double> y);

/// Average pairwise Kendall's tau-a over all column pairs.
double kendall_tau_empirical(const Matrix& samples);

}  // namespace gqrs::copulas
