#pragma once

#include <array>
#include <cstdint>

namespace gqrs::designs::detail {

struct SobolPolynomial {
  std::uint32_t degree;
  std::uint32_t coefficients;  // interior coefficients a_1..a_{s-1}, MSB first
  std::array<std::uint32_t, 9> m;
};

// Joe & Kuo (2008), new-joe-kuo-6.21201, dimensions 2..64.
extern const std::array<SobolPolynomial, 63> kSobolPolynomials;

}  // namespace gqrs::designs::detail
