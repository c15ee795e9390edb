#include "gqrs/copulas.hpp"
#include "gqrs/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gqrs;
using namespace gqrs::copulas;

namespace {

const CopulaSpec kClayton3 = CopulaSpec::clayton(2.0 / 3.0, 3);
const CopulaSpec kGumbel3 = CopulaSpec::gumbel(4.0 / 3.0, 3);
const CopulaSpec kMo = CopulaSpec::marshall_olkin(0.75, 0.60);

double cdf(const CopulaSpec& s, std::vector<double> u) { return copula_cdf(s, u); }

std::vector<double> column(const Matrix& m, Eigen::Index j) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, j);
  return v;
}

}  // namespace

TEST(CopulaCdf, ClaytonBoundaryIsMargin) { EXPECT_NEAR(cdf(kClayton3, {0.7, 1.0, 1.0}), 0.7, 1e-15); }

TEST(CopulaCdf, MarshallOlkinHandValue) {
  const double expected = std::min(std::pow(0.5, 0.25) * 0.5, 0.5 * std::pow(0.5, 0.4));
  EXPECT_NEAR(cdf(kMo, {0.5, 0.5}), expected, 1e-15);
  EXPECT_NEAR(expected, std::pow(0.5, 1.4), 1e-15);
}

TEST(CopulaCdf, GumbelThetaOneIsIndependence) {
  const auto g = CopulaSpec::gumbel(1.0, 3);
  EXPECT_NEAR(cdf(g, {0.3, 0.8, 0.55}), 0.3 * 0.8 * 0.55, 1e-15);
}

TEST(CopulaCdf, ZeroCoordinateGivesZero) {
  EXPECT_EQ(cdf(kClayton3, {0.0, 0.5, 0.5}), 0.0);
  EXPECT_EQ(cdf(kGumbel3, {0.5, 0.0, 0.5}), 0.0);
  EXPECT_EQ(cdf(kMo, {0.5, 0.0}), 0.0);
}

TEST(CopulaCdf, DimensionMismatchThrows) {
  try {
    cdf(kClayton3, {0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(CopulaCdf, UniformMargins) {
  CounterRng rng(1);
  for (const auto& spec : {kClayton3, kGumbel3, kMo, CopulaSpec::clayton(4.0, 5), CopulaSpec::gumbel(2.5, 4)})
    for (int i = 0; i < 100; ++i)
      for (std::size_t j = 0; j < spec.dim(); ++j) {
        std::vector<double> u(spec.dim(), 1.0);
        u[j] = rng.uniform();
        ASSERT_NEAR(copula_cdf(spec, u), u[j], 1e-12);
      }
}

TEST(CopulaCdf, ComponentwiseNondecreasing) {
  CounterRng rng(2);
  for (const auto& spec : {kClayton3, kGumbel3, kMo})
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> lo(spec.dim()), hi(spec.dim());
      for (std::size_t j = 0; j < spec.dim(); ++j) {
        lo[j] = rng.uniform();
        hi[j] = lo[j] + (1.0 - lo[j]) * rng.uniform();
      }
      ASSERT_LE(copula_cdf(spec, lo), copula_cdf(spec, hi) + 1e-15);
    }
}

TEST(ThetaFromTau, KnownValues) {
  EXPECT_NEAR(theta_from_tau(Family::Clayton, 0.25), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(theta_from_tau(Family::Gumbel, 0.25), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(theta_from_tau(Family::Gumbel, 0.0), 1.0);
  EXPECT_THROW(theta_from_tau(Family::Clayton, 0.0), Error);
  EXPECT_THROW(theta_from_tau(Family::Gumbel, 1.0), Error);
  EXPECT_THROW(theta_from_tau(Family::MarshallOlkin, 0.3), Error);
}

TEST(CopulaSpec, ValidatesParameters) {
  EXPECT_THROW(CopulaSpec::clayton(0.0, 2), Error);
  EXPECT_THROW(CopulaSpec::gumbel(0.9, 2), Error);
  EXPECT_THROW(CopulaSpec::marshall_olkin(1.2, 0.5), Error);
  EXPECT_THROW(CopulaSpec::clayton(1.0, 1), Error);
}

TEST(Cdm, ClaytonMatchesNumericalConditional) {
  const auto spec = CopulaSpec::clayton(2.0 / 3.0, 2);
  const double v[] = {0.5, 0.5};
  const auto u = cdm_transform(spec, v);
  EXPECT_EQ(u[0], 0.5);
  // C(u2 | u1) = dC/du1 (u1, u2), since dC/du1 (u1, 1) = 1.
  const double h = 1e-6;
  const double num = (cdf(spec, {u[0] + h, u[1]}) - cdf(spec, {u[0] - h, u[1]})) / (2 * h);
  EXPECT_NEAR(num, 0.5, 1e-6);
}

TEST(Cdm, ClaytonThirdCoordinateMatchesNumericalConditional) {
  const double v[] = {0.3, 0.6, 0.8};
  const auto u = cdm_transform(kClayton3, v);
  // C(u3 | u1, u2) = d2C/du1du2 (u1,u2,u3) / d2C/du1du2 (u1,u2,1)
  const double h = 1e-4;
  auto mixed = [&](double z) {
    return (cdf(kClayton3, {u[0] + h, u[1] + h, z}) - cdf(kClayton3, {u[0] + h, u[1] - h, z}) -
            cdf(kClayton3, {u[0] - h, u[1] + h, z}) + cdf(kClayton3, {u[0] - h, u[1] - h, z})) /
           (4 * h * h);
  };
  EXPECT_NEAR(mixed(u[2]) / mixed(1.0), 0.8, 1e-5);
}

TEST(Cdm, GumbelIndependenceIsIdentity) {
  const auto g = CopulaSpec::gumbel(1.0, 3);
  const double v[] = {0.2, 0.7, 0.45};
  const auto u = cdm_transform(g, v);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(u[static_cast<std::size_t>(j)], v[j], 1e-10);
}

TEST(Cdm, GumbelRejectsHighDimension) {
  const auto g = CopulaSpec::gumbel(2.0, 4);
  const double v[] = {0.5, 0.5, 0.5, 0.5};
  try {
    cdm_transform(g, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionUnsupported);
  }
}

TEST(Cdm, MarshallOlkinAtomBand) {
  const double u1 = 0.5;
  const double A = std::pow(u1, 0.75 / 0.60 - 0.75);
  const double v2 = 0.5 * ((1 - 0.75) * A + A);
  const double v[] = {u1, v2};
  const auto u = cdm_transform(kMo, v);
  EXPECT_NEAR(u[1], std::pow(0.5, 1.25), 1e-15);
  // The conditional CDF jumps across the band at the atom location.
  const double below[] = {u1};
  const double left = conditional_cdf(kMo, below, u[1] * (1 - 1e-9));
  const double right = conditional_cdf(kMo, below, u[1]);
  EXPECT_NEAR(left, (1 - 0.75) * A, 1e-8);
  EXPECT_NEAR(right, A, 1e-8);
  EXPECT_LE(left, v2);
  EXPECT_GE(right, v2);
}

TEST(Cdm, RoundTripAllFamilies) {
  for (const auto& spec : {CopulaSpec::clayton(2.0 / 3.0, 2), CopulaSpec::gumbel(4.0 / 3.0, 2), CopulaSpec::gumbel(3.0, 3),
                           kClayton3, kGumbel3, kMo}) {
    double worst = 0.0;
    for (int a = 1; a < 20; ++a)
      for (int b = 1; b < 20; ++b) {
        std::vector<double> v(spec.dim(), 0.37);
        v[0] = a / 20.0;
        v.back() = b / 20.0;
        if (spec.family() == Family::MarshallOlkin) {
          const double A = std::pow(v[0], 0.75 / 0.60 - 0.75);
          if (v[1] >= (1 - 0.75) * A && v[1] < A) continue;
        }
        const auto u = cdm_transform(spec, v);
        for (std::size_t j = 1; j < spec.dim(); ++j) {
          const std::span<const double> prefix(u.data(), j);
          worst = std::max(worst, std::abs(conditional_cdf(spec, prefix, u[j]) - v[j]));
        }
      }
    EXPECT_LT(worst, 1e-8) << to_string(spec.family()) << " d=" << spec.dim();
  }
}

TEST(SampleCdm, KendallTauTargets) {
  CounterRng r1(10), r2(11);
  EXPECT_NEAR(kendall_tau_empirical(sample_cdm(CopulaSpec::clayton(2.0 / 3.0, 2), 100000, r1)), 0.25, 0.01);
  EXPECT_NEAR(kendall_tau_empirical(sample_cdm(CopulaSpec::gumbel(4.0 / 3.0, 2), 100000, r2)), 0.25, 0.01);
}

TEST(SampleCdm, MarshallOlkinAtomHitRate) {
  CounterRng rng(12);
  const Matrix s = sample_cdm(kMo, 100000, rng);
  int hits = 0;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    hits += std::abs(s(i, 1) - std::pow(s(i, 0), 0.75 / 0.60)) <= 1e-12 * s(i, 1) ? 1 : 0;
  // integral over (0,1) of the jump size alpha1 * u^(alpha1/alpha2 - alpha1)
  double expected = 0.0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) expected += 0.75 * std::pow((i + 0.5) / m, 0.75 / 0.60 - 0.75) / m;
  EXPECT_NEAR(static_cast<double>(hits) / 100000.0, expected, 0.01);
}

TEST(SampleCdm, EmpiricalCopulaMatchesCdfOnGrid) {
  const int n = 100000;
  for (const auto& spec : {CopulaSpec::clayton(2.0 / 3.0, 2), CopulaSpec::gumbel(4.0 / 3.0, 2), kMo}) {
    CounterRng rng(13);
    const Matrix s = sample_cdm(spec, n, rng);
    for (int a = 1; a <= 5; ++a)
      for (int b = 1; b <= 5; ++b) {
        const double u[] = {a / 6.0, b / 6.0};
        int count = 0;
        for (Eigen::Index i = 0; i < s.rows(); ++i) count += (s(i, 0) <= u[0] && s(i, 1) <= u[1]) ? 1 : 0;
        const double c = copula_cdf(spec, u);
        EXPECT_NEAR(static_cast<double>(count) / n, c, 3.0 * std::sqrt(c * (1 - c) / n))
            << to_string(spec.family()) << " at (" << u[0] << "," << u[1] << ")";
      }
  }
}

TEST(SampleCdm, UsesLeadingCoordinatesOfWiderSource) {
  const auto ps = designs::sobol_points(16, 5, 3, designs::Randomization::DigitalShift);
  const Matrix s = sample_cdm(kClayton3, ps);
  ASSERT_EQ(s.cols(), 3);
  for (std::size_t i = 0; i < 16; ++i) {
    const double v[] = {ps(i, 0), ps(i, 1), ps(i, 2)};
    const auto u = cdm_transform(kClayton3, v);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(s(static_cast<Eigen::Index>(i), j), u[static_cast<std::size_t>(j)]);
  }
  EXPECT_THROW(sample_cdm(kClayton3, designs::sobol_points(4, 2, 0, designs::Randomization::DigitalShift)), Error);
}

TEST(PseudoObservations, RankExamples) {
  Matrix d(3, 1);
  d << 3.2, -1.0, 7.5;
  const Matrix p = pseudo_observations(d);
  EXPECT_EQ(p(0, 0), 0.5);
  EXPECT_EQ(p(1, 0), 0.25);
  EXPECT_EQ(p(2, 0), 0.75);

  Matrix sorted(4, 1);
  sorted << 1, 2, 3, 4;
  const Matrix q = pseudo_observations(sorted);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(q(i, 0), (i + 1) / 5.0);

  Matrix tie(2, 1);
  tie << 1.0, 1.0;
  const Matrix t = pseudo_observations(tie);
  EXPECT_EQ(t(0, 0), 1.0 / 3.0);
  EXPECT_EQ(t(1, 0), 2.0 / 3.0);
}

TEST(PseudoObservations, Errors) {
  Matrix one(1, 2);
  one << 1, 2;
  EXPECT_THROW(pseudo_observations(one), Error);
  Matrix nan(2, 1);
  nan << 1.0, std::nan("");
  try {
    pseudo_observations(nan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
  }
}

TEST(PseudoObservations, InvariantUnderIncreasingTransforms) {
  CounterRng rng(5);
  Matrix d(200, 3);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = rng.normal();
  Matrix t = d;
  t.col(0) = d.col(0).array().exp();
  t.col(1) = d.col(1).array().cube() + 5.0;
  t.col(2) = d.col(2).array().unaryExpr([](double x) { return std::atan(x); });
  EXPECT_EQ(pseudo_observations(d), pseudo_observations(t));
}

TEST(KendallTau, HandExamples) {
  Matrix co(5, 2), anti(5, 2), four(4, 2);
  co << 1, 10, 2, 20, 3, 30, 4, 40, 5, 50;
  anti << 1, 5, 2, 4, 3, 3, 4, 2, 5, 1;
  four << 1, 1, 2, 3, 3, 2, 4, 4;
  EXPECT_EQ(kendall_tau_empirical(co), 1.0);
  EXPECT_EQ(kendall_tau_empirical(anti), -1.0);
  EXPECT_NEAR(kendall_tau_empirical(four), 2.0 / 3.0, 1e-15);
}

TEST(KendallTau, FastPathMatchesPairEnumeration) {
  CounterRng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse values force ties in both coordinates
      x[i] = static_cast<double>(rng.below(trial % 2 ? 10 : 1000000));
      y[i] = static_cast<double>(rng.below(trial % 3 ? 7 : 1000000)) + 0.1 * x[i];
    }
    EXPECT_NEAR(kendall_tau_pair(x, y), oracle::kendall_tau_pairs(x, y), 1e-12) << "trial " << trial;
  }
}

TEST(KendallTau, AveragesAllColumnPairs) {
  CounterRng rng(7);
  const Matrix s = sample_cdm(kClayton3, 300, rng);
  double expected = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) expected += oracle::kendall_tau_pairs(column(s, a), column(s, b)) / 3.0;
  EXPECT_NEAR(kendall_tau_empirical(s), expected, 1e-12);
}
