#pragma once

#include "gqrs/common.hpp"
#include "gqrs/designs.hpp"
#include "gqrs/gan.hpp"
#include "gqrs/normal.hpp"

#include <cstdint>
#include <string_view>

namespace gqrs::qrs {

/// Which point set feeds the pipeline. For OaLhd the level count s is
/// derived from n = s^2.
struct DesignSpec {
  designs::Family family = designs::Family::Sobol;
  designs::Randomization randomize = designs::Randomization::DigitalShift;
};

DesignSpec parse_design(std::string_view name);
std::string_view design_name(const DesignSpec& spec);

/// s with s*s == n and s prime, or 0.
std::size_t prime_square_root(std::size_t n);

/// Point set of the requested family on [0,1)^k.
designs::PointSet make_design(const DesignSpec& spec, std::size_t n, std::size_t k, std::uint64_t seed);

struct LatentBatch {
  Matrix z;             // n x k standard-normal quantiles
  std::size_t clamped;  // coordinates moved into [2^-53, 1-2^-53]
};

/// Componentwise Phi^-1 of the design points after clamping to [2^-53, 1-2^-53].
LatentBatch to_latent(const designs::PointSet& points);

struct QrsRequest {
  DesignSpec design;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct QrsResult {
  Matrix samples;  // n x d, strictly inside (0,1)^d
  std::size_t clamped = 0;         // design coordinates clamped before Phi^-1
  std::size_t output_clamped = 0;  // generator outputs clamped into the open cube
};

/// u_i = G(Phi^-1(v_i)) for the points v_i of a randomized design.
QrsResult qrs_sample(const gan::GanModel& model, const QrsRequest& request);

}  // namespace gqrs::qrs
