#include "gqrs/risk.hpp"
#include "gqrs/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace gqrs;
using namespace gqrs::risk;

namespace {

std::vector<double> iota_values(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

}  // namespace

TEST(AggregateLoss, HandValues) {
  Matrix u(2, 2);
  u << 0.5, 0.5, 0.975, 0.975;
  const auto s = aggregate_loss(u);
  EXPECT_NEAR(s[0], 0.0, 1e-15);
  EXPECT_NEAR(s[1], 2 * 1.959963984540054, 1e-9);
}

TEST(AggregateLoss, ReflectionAntisymmetry) {
  CounterRng rng(1);
  Matrix u(50, 3);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = 0.01 + 0.98 * rng.uniform();
  const Matrix r = (1.0 - u.array()).matrix();
  const auto a = aggregate_loss(u), b = aggregate_loss(r);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], -b[i], 1e-12);
}

TEST(AggregateLoss, RejectsBoundaryValues) {
  Matrix u(1, 2);
  u << 0.0, 0.5;
  EXPECT_THROW(aggregate_loss(u), Error);
  u << 0.5, 1.0;
  EXPECT_THROW(aggregate_loss(u), Error);
}

TEST(ExpectedShortfall, HandExamples) {
  EXPECT_DOUBLE_EQ(expected_shortfall(iota_values(100), 0.99), 100.0);
  EXPECT_DOUBLE_EQ(expected_shortfall(iota_values(1000), 0.99), 995.5);
  EXPECT_DOUBLE_EQ(value_at_risk(iota_values(1000), 0.99), 990.0);
  EXPECT_EQ(var_index(1000, 0.99), 990u);
}

TEST(ExpectedShortfall, OrderIrrelevant) {
  auto v = iota_values(1000);
  std::reverse(v.begin(), v.end());
  EXPECT_DOUBLE_EQ(expected_shortfall(v, 0.99), 995.5);
}

TEST(ExpectedShortfall, Errors) {
  EXPECT_THROW(expected_shortfall(iota_values(50), 0.99), Error);
  EXPECT_THROW(expected_shortfall(iota_values(100), 1.0), Error);
  EXPECT_THROW(expected_shortfall(iota_values(100), 0.0), Error);
  auto v = iota_values(200);
  v[3] = std::nan("");
  EXPECT_THROW(expected_shortfall(v, 0.99), Error);
  EXPECT_THROW((EsSpec{1.5}.validate()), Error);
}

TEST(ExpectedShortfall, Properties) {
  CounterRng rng(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> v(1000);
    for (auto& x : v) x = rng.normal();
    const double es = expected_shortfall(v, 0.99);
    EXPECT_GE(es, value_at_risk(v, 0.99));
    EXPECT_LE(expected_shortfall(v, 0.95), es);
    auto shifted = v;
    for (auto& x : shifted) x += 4.0;
    EXPECT_NEAR(expected_shortfall(shifted, 0.99), es + 4.0, 1e-12);
    auto scaled = v;
    for (auto& x : scaled) x *= 2.0;
    EXPECT_EQ(expected_shortfall(scaled, 0.99), 2.0 * es);
  }
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("Bogus"), Error);
  EXPECT_FALSE(needs_model(Method::CdmSobol));
  EXPECT_TRUE(needs_model(Method::GanOaLhd));
  EXPECT_EQ(design_label(Method::GanOaLhd), "oalhd");
}

TEST(VarianceStudy, SingleReplicationHasNoSd) {
  StudyConfig c;
  c.n_grid = {200};
  c.replications = 1;
  const auto r = variance_study(c);
  ASSERT_EQ(r.summary.size(), 2u);
  EXPECT_FALSE(r.summary[0].sd.has_value());
  EXPECT_NE(summary_csv(r).find("NA"), std::string::npos);
}

TEST(VarianceStudy, IndependentOfThreadCount) {
  StudyConfig c;
  c.n_grid = {300, 100};
  c.replications = 5;
  c.methods = {Method::CdmSobol, Method::CdmMc, Method::CdmMc};
  const auto one = variance_study(c);
  c.threads = 3;
  const auto three = variance_study(c);
  EXPECT_EQ(records_csv(one), records_csv(three));
  EXPECT_EQ(summary_csv(one), summary_csv(three));
  ASSERT_EQ(one.records.size(), 2u * 2u * 5u);
  EXPECT_EQ(one.records.front().n, 100u);
}

TEST(VarianceStudy, SkipsInfeasibleCombinations) {
  StudyConfig c;
  c.n_grid = {200};
  c.replications = 2;
  c.methods = {Method::CdmMc, Method::GanSobol};
  const auto r = variance_study(c);
  EXPECT_EQ(r.skipped.size(), 1u);
  for (const auto& rec : r.records) EXPECT_EQ(rec.method, Method::CdmMc);
  EXPECT_FALSE(infeasibility(Method::GanOaLhd, 200, c, nullptr).empty());
}

TEST(VarianceStudy, SobolReducesVariance) {
  StudyConfig c;
  c.n_grid = {8192};
  c.replications = 25;
  const auto r = variance_study(c);
  ASSERT_EQ(r.summary.size(), 2u);
  EXPECT_LT(*r.summary[1].sd, 0.9 * *r.summary[0].sd);
}

TEST(VarianceStudy, EstimatesNearTruthForIndependence) {
  StudyConfig c;
  c.copula = copulas::CopulaSpec::gumbel(1.0, 2);
  c.n_grid = {8192};
  c.replications = 4;
  c.methods = {Method::CdmSobol};
  const auto r = variance_study(c);
  // sum of two independent normals is N(0, 2)
  const double truth = std::sqrt(2.0) * 2.665214220345808;
  for (const auto& rec : r.records) EXPECT_NEAR(rec.estimate, truth, 0.1);
}

TEST(LogLogSlope, PowerLaw) {
  const std::vector<double> x{1, 2, 4, 8}, y{1, 0.5, 0.25, 0.125};
  EXPECT_NEAR(loglog_slope(x, y), -1.0, 1e-12);
}

TEST(SampleSd, Basic) {
  EXPECT_FALSE(sample_sd({1.0}).has_value());
  EXPECT_NEAR(*sample_sd({1.0, 2.0, 3.0, 4.0}), std::sqrt(5.0 / 3.0), 1e-15);
}

TEST(StudyCsv, Headers) {
  StudyConfig c;
  c.n_grid = {200};
  c.replications = 2;
  const auto r = variance_study(c);
  EXPECT_EQ(records_csv(r).substr(0, records_csv(r).find('\n')), "method,design,n,replication,estimate");
  EXPECT_NE(summary_svg(r).find("<svg"), std::string::npos);
}
