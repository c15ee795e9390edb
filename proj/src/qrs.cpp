#include "gqrs/qrs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gqrs::qrs {

DesignSpec parse_design(std::string_view name) {
  using designs::Family;
  using designs::Randomization;
  if (name == "sobol") return {Family::Sobol, Randomization::DigitalShift};
  if (name == "sobol-owen") return {Family::Sobol, Randomization::OwenScramble};
  if (name == "lhd") return {Family::Lhd, Randomization::None};
  if (name == "oalhd") return {Family::OaLhd, Randomization::None};
  if (name == "random" || name == "pseudo-random" || name == "mc") return {Family::PseudoRandom, Randomization::None};
  throw Error(ErrorKind::InvalidArgument, "unknown design '" + std::string(name) + "'");
}

std::string_view design_name(const DesignSpec& spec) {
  if (spec.family == designs::Family::Sobol && spec.randomize == designs::Randomization::OwenScramble)
    return "sobol-owen";
  if (spec.family == designs::Family::Sobol && spec.randomize == designs::Randomization::None) return "sobol-plain";
  return designs::to_string(spec.family);
}

std::size_t prime_square_root(std::size_t n) {
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  for (std::size_t c = s > 0 ? s - 1 : 0; c <= s + 1; ++c)
    if (c * c == n && designs::is_prime(c)) return c;
  return 0;
}

designs::PointSet make_design(const DesignSpec& spec, std::size_t n, std::size_t k, std::uint64_t seed) {
  using designs::Family;
  if (n == 0) {
    require(k >= 1, ErrorKind::InvalidArgument, "make_design: k must be positive");
    return designs::PointSet(Matrix(0, static_cast<Eigen::Index>(k)), spec.family, seed);
  }
  switch (spec.family) {
    case Family::PseudoRandom: return designs::pseudo_random_points(n, k, seed);
    case Family::Sobol: return designs::sobol_points(n, k, seed, spec.randomize);
    case Family::Lhd: return designs::lhd_points(n, k, seed);
    case Family::OaLhd: {
      const std::size_t s = prime_square_root(n);
      require(s != 0, ErrorKind::InvalidArgument,
              "OA-based LHD needs n = s^2 with s prime (got n=" + std::to_string(n) + ")");
      require(k <= s + 1, ErrorKind::InvalidArgument,
              "OA-based LHD with s=" + std::to_string(s) + " supports at most " + std::to_string(s + 1) + " columns");
      if (k == 1) {
        const auto two = designs::oa_lhd_points(designs::bose_oa(s, 2), seed);
        return designs::PointSet(two.points().leftCols(1), Family::OaLhd, seed);
      }
      return designs::oa_lhd_points(designs::bose_oa(s, k), seed);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "make_design: unknown family");
}

LatentBatch to_latent(const designs::PointSet& points) {
  LatentBatch out{Matrix(points.points().rows(), points.points().cols()), 0};
  const Matrix& v = points.points();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v.data()[i];
    if (x < kOpenUnitLow || x > kOpenUnitHigh) {
      x = std::clamp(x, kOpenUnitLow, kOpenUnitHigh);
      ++out.clamped;
    }
    out.z.data()[i] = normal_inverse_cdf(x);
  }
  return out;
}

QrsResult qrs_sample(const gan::GanModel& model, const QrsRequest& request) {
  require(!(request.design.family == designs::Family::Sobol &&
            request.design.randomize == designs::Randomization::None),
          ErrorKind::InvalidArgument, "qrs_sample: Sobol input must be randomized (the origin maps to -infinity)");
  const std::size_t k = model.latent_dim();
  const auto points = make_design(request.design, request.n, k, request.seed);
  auto latent = to_latent(points);
  QrsResult result;
  result.clamped = latent.clamped;
  result.samples = gan::gan_generate(model, latent.z);
  // A saturated sigmoid can round to exactly 0 or 1.
  for (Eigen::Index i = 0; i < result.samples.size(); ++i) {
    double& u = result.samples.data()[i];
    if (u < kOpenUnitLow || u > kOpenUnitHigh) {
      u = std::clamp(u, kOpenUnitLow, kOpenUnitHigh);
      ++result.output_clamped;
    }
  }
  return result;
}

}  // namespace gqrs::qrs
