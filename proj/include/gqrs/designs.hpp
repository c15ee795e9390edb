#pragma once

#include "gqrs/common.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gqrs::designs {

enum class Family { PseudoRandom, Sobol, Lhd, OaLhd };
enum class Randomization { None, DigitalShift, OwenScramble };

std::string_view to_string(Family family);
std::string_view to_string(Randomization r);
Randomization parse_randomization(std::string_view name);

/// An immutable n x k point set in [0,1)^k together with how it was made.
class PointSet {
 public:
  PointSet(Matrix points, Family family, std::uint64_t seed);

  std::size_t n() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t k() const { return static_cast<std::size_t>(points_.cols()); }
  const Matrix& points() const { return points_; }
  double operator()(std::size_t i, std::size_t j) const {
    return points_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  Family family() const { return family_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Matrix points_;
  Family family_;
  std::uint64_t seed_;
};

/// Level matrix of an orthogonal array OA(n, s^k, t).
struct OrthogonalArray {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t s = 0;
  std::size_t t = 0;
  std::vector<std::uint32_t> cells;  // row-major n x k, entries in {0,...,s-1}

  std::uint32_t operator()(std::size_t row, std::size_t col) const { return cells[row * k + col]; }
};

/// Largest dimension covered by the embedded Joe-Kuo direction numbers.
inline constexpr std::size_t kMaxSobolDimension = 64;

/// First n points of the Sobol sequence (Gray-code order, index 0 included).
/// DigitalShift XORs each coordinate with a per-dimension random 52-bit
/// vector; OwenScramble applies nested uniform scrambling to the leading 32
/// bits and fills the remaining 20 bits at random.
PointSet sobol_points(std::size_t n, std::size_t k, std::uint64_t seed,
                      Randomization randomize);

PointSet lhd_points(std::size_t n, std::size_t k, std::uint64_t seed);

PointSet pseudo_random_points(std::size_t n, std::size_t k, std::uint64_t seed);

bool is_prime(std::size_t s);

/// Bose construction of OA(s^2, s^k, 2) for prime s and 2 <= k <= s+1.
/// Row (a,b) sits at index a*s + b.
OrthogonalArray bose_oa(std::size_t s, std::size_t k);

/// True if every n x t projection contains each level combination n/s^t times.
bool has_strength(const OrthogonalArray& oa, std::size_t t);

/// Randomized OA-based Latin hypercube (Tang's construction).
PointSet oa_lhd_points(const OrthogonalArray& oa, std::uint64_t seed);

/// Largest n and k accepted by star_discrepancy.
inline constexpr std::size_t kMaxExactDiscrepancyPoints = 4096;
inline constexpr std::size_t kMaxExactDiscrepancyDim = 3;

/// |(1/n) #{v_i in [0,a)} - prod a_j|.
double local_discrepancy(const PointSet& ps, std::span<const double> a);

/// Exact star discrepancy by enumeration of the critical grid. Cost is
/// O(n^k); refuses inputs beyond kMaxExactDiscrepancyPoints / Dim.
double star_discrepancy(const PointSet& ps);

}  // namespace gqrs::designs
