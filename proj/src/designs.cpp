#include "gqrs/designs.hpp"
#include "gqrs/rng.hpp"
#include "sobol_table.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

namespace gqrs::designs {

namespace {

constexpr std::size_t kSobolBits = 32;

using DirectionNumbers = std::array<std::uint32_t, kSobolBits>;

DirectionNumbers direction_numbers(std::size_t dim) {
  DirectionNumbers v{};
  if (dim == 0) {
    for (std::size_t j = 0; j < kSobolBits; ++j) v[j] = 1u << (31 - j);
    return v;
  }
  const auto& poly = detail::kSobolPolynomials[dim - 1];
  const std::size_t s = poly.degree;
  for (std::size_t j = 0; j < s; ++j) v[j] = poly.m[j] << (31 - j);
  for (std::size_t j = s; j < kSobolBits; ++j) {
    v[j] = v[j - s] ^ (v[j - s] >> s);
    for (std::size_t l = 1; l < s; ++l) {
      if ((poly.coefficients >> (s - 1 - l)) & 1u) v[j] ^= v[j - l];
    }
  }
  return v;
}

// Nested uniform scramble of the leading 32 bits; each bit is flipped by a
// hash of the bits above it, so points sharing a prefix share the flips.
std::uint64_t owen_scramble(std::uint32_t x, std::uint64_t key) {
  std::uint64_t y = 0;
  for (std::size_t level = 0; level < kSobolBits; ++level) {
    const std::uint64_t prefix = level == 0 ? 0 : (x >> (kSobolBits - level));
    const std::uint64_t h = mix64(key ^ mix64((static_cast<std::uint64_t>(level) << 32) | prefix));
    const std::uint64_t bit = ((x >> (31 - level)) & 1u) ^ (h & 1u);
    y = (y << 1) | bit;
  }
  const std::uint64_t tail = mix64(key ^ mix64(0x1000000000ULL | x)) >> 44;
  return (y << 20) | tail;
}

// Point in [bin/n, (bin+1)/n) with floor(n*d) == bin in floating point.
double stratum_point(std::size_t bin, std::size_t n, double u) {
  const double nd = static_cast<double>(n);
  const double lower = static_cast<double>(bin);
  double d = (lower + u) / nd;
  while (d > 0.0 && (d >= 1.0 || std::floor(d * nd) > lower)) d = std::nextafter(d, 0.0);
  while (std::floor(d * nd) < lower) d = std::nextafter(d, 1.0);
  return d;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::PseudoRandom: return "pseudo-random";
    case Family::Sobol: return "sobol";
    case Family::Lhd: return "lhd";
    case Family::OaLhd: return "oalhd";
  }
  return "unknown";
}

std::string_view to_string(Randomization r) {
  switch (r) {
    case Randomization::None: return "none";
    case Randomization::DigitalShift: return "shift";
    case Randomization::OwenScramble: return "owen";
  }
  return "unknown";
}

Randomization parse_randomization(std::string_view name) {
  if (name == "none") return Randomization::None;
  if (name == "shift" || name == "digital-shift") return Randomization::DigitalShift;
  if (name == "owen" || name == "scramble") return Randomization::OwenScramble;
  throw Error(ErrorKind::InvalidArgument, "unknown randomization '" + std::string(name) + "'");
}

PointSet::PointSet(Matrix points, Family family, std::uint64_t seed)
    : points_(std::move(points)), family_(family), seed_(seed) {
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    const double x = points_.data()[i];
    require(x >= 0.0 && x < 1.0, ErrorKind::Domain, "point set entries must lie in [0,1)");
  }
}

PointSet sobol_points(std::size_t n, std::size_t k, std::uint64_t seed, Randomization randomize) {
  require(k >= 1, ErrorKind::InvalidArgument, "sobol_points: k must be at least 1");
  require(k <= kMaxSobolDimension, ErrorKind::DimensionUnsupported,
          "sobol_points: dimension " + std::to_string(k) + " exceeds the embedded table (" +
              std::to_string(kMaxSobolDimension) + ")");
  require(n <= (std::size_t{1} << kSobolBits), ErrorKind::InvalidArgument,
          "sobol_points: n exceeds 2^32");

  Matrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  CounterRng rng(seed);
  for (std::size_t j = 0; j < k; ++j) {
    const DirectionNumbers v = direction_numbers(j);
    const std::uint64_t key = rng();
    std::uint32_t x = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) x ^= v[static_cast<std::size_t>(std::countr_zero(i))];
      std::uint64_t bits52 = 0;
      switch (randomize) {
        case Randomization::None: bits52 = static_cast<std::uint64_t>(x) << 20; break;
        case Randomization::DigitalShift: bits52 = (static_cast<std::uint64_t>(x) << 20) ^ (key >> 12); break;
        case Randomization::OwenScramble: bits52 = owen_scramble(x, key); break;
      }
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(bits52) * 0x1p-52;
    }
  }
  return PointSet(std::move(pts), Family::Sobol, seed);
}

PointSet lhd_points(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(n >= 1 && k >= 1, ErrorKind::InvalidArgument, "lhd_points: n and k must be positive");
  Matrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  CounterRng rng(seed);
  for (std::size_t j = 0; j < k; ++j) {
    const auto perm = rng.permutation(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          stratum_point(perm[i], n, rng.uniform());
    }
  }
  return PointSet(std::move(pts), Family::Lhd, seed);
}

PointSet pseudo_random_points(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k >= 1, ErrorKind::InvalidArgument, "pseudo_random_points: k must be positive");
  Matrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  CounterRng rng(seed);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = rng.uniform();
  return PointSet(std::move(pts), Family::PseudoRandom, seed);
}

bool is_prime(std::size_t s) {
  if (s < 2) return false;
  for (std::size_t f = 2; f * f <= s; ++f)
    if (s % f == 0) return false;
  return true;
}

OrthogonalArray bose_oa(std::size_t s, std::size_t k) {
  require(is_prime(s), ErrorKind::InvalidArgument, "bose_oa: s=" + std::to_string(s) + " is not prime");
  require(k >= 2, ErrorKind::InvalidArgument, "bose_oa: need at least 2 columns");
  require(k <= s + 1, ErrorKind::InvalidArgument,
          "bose_oa: k=" + std::to_string(k) + " exceeds s+1=" + std::to_string(s + 1));
  OrthogonalArray oa{s * s, k, s, 2, std::vector<std::uint32_t>(s * s * k)};
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) {
      const std::size_t row = a * s + b;
      oa.cells[row * k + 0] = static_cast<std::uint32_t>(a);
      oa.cells[row * k + 1] = static_cast<std::uint32_t>(b);
      for (std::size_t j = 1; j + 2 <= k; ++j)
        oa.cells[row * k + j + 1] = static_cast<std::uint32_t>((a + j * b) % s);
    }
  }
  return oa;
}

bool has_strength(const OrthogonalArray& oa, std::size_t t) {
  if (t == 0 || t > oa.k || oa.s == 0) return false;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < t; ++i) combos *= oa.s;
  if (oa.n % combos != 0) return false;
  const std::size_t expected = oa.n / combos;

  std::vector<std::size_t> cols(t);
  for (std::size_t i = 0; i < t; ++i) cols[i] = i;
  std::vector<std::size_t> counts(combos);
  while (true) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t r = 0; r < oa.n; ++r) {
      std::size_t code = 0;
      for (std::size_t c : cols) code = code * oa.s + oa(r, c);
      ++counts[code];
    }
    for (std::size_t c : counts)
      if (c != expected) return false;
    // next t-subset of columns in lexicographic order
    std::size_t i = t;
    while (i > 0 && cols[i - 1] == oa.k - t + i - 1) --i;
    if (i == 0) break;
    ++cols[i - 1];
    for (std::size_t j = i; j < t; ++j) cols[j] = cols[j - 1] + 1;
  }
  return true;
}

PointSet oa_lhd_points(const OrthogonalArray& oa, std::uint64_t seed) {
  require(oa.n >= 1 && oa.k >= 1 && oa.s >= 1, ErrorKind::InvalidArgument, "oa_lhd_points: empty array");
  require(oa.cells.size() == oa.n * oa.k, ErrorKind::InvalidArgument, "oa_lhd_points: cell count mismatch");
  require(oa.t >= 2 && oa.n % oa.s == 0, ErrorKind::InvalidArgument,
          "oa_lhd_points: array must have strength >= 2");
  const std::size_t per_level = oa.n / oa.s;

  Matrix pts(static_cast<Eigen::Index>(oa.n), static_cast<Eigen::Index>(oa.k));
  CounterRng rng(seed);
  std::vector<std::size_t> within(oa.n);
  for (std::size_t j = 0; j < oa.k; ++j) {
    // Step 1: the positions holding level e get a random permutation of 1..n/s.
    for (std::size_t e = 0; e < oa.s; ++e) {
      const auto perm = rng.permutation(per_level);
      std::size_t next = 0;
      for (std::size_t r = 0; r < oa.n; ++r) {
        if (oa(r, j) != e) continue;
        require(next < per_level, ErrorKind::InvalidArgument, "oa_lhd_points: unbalanced column");
        within[r] = perm[next++] + 1;
      }
      require(next == per_level, ErrorKind::InvalidArgument, "oa_lhd_points: unbalanced column");
    }
    // Step 2: d = a/s + (b - eps)/n with eps = 1 - u, u ~ U[0,1).
    for (std::size_t r = 0; r < oa.n; ++r) {
      const std::size_t bin = oa(r, j) * per_level + within[r] - 1;
      pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = stratum_point(bin, oa.n, rng.uniform());
    }
  }
  return PointSet(std::move(pts), Family::OaLhd, seed);
}

}  // namespace gqrs::designs
