#pragma once

#include "gqrs/common.hpp"
#include "gqrs/copulas.hpp"
#include "gqrs/designs.hpp"
#include "gqrs/gan.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gqrs::risk {

struct EsSpec {
  double alpha = 0.99;
  void validate() const;
};

/// S_i = sum_j Phi^-1(u_ij); entries must lie strictly inside (0,1).
std::vector<double> aggregate_loss(const Matrix& u);

/// Position m = ceil(n * alpha) (1-based) in the ascending order statistics.
/// A relative tolerance of 1e-9 absorbs representation error in n * alpha.
std::size_t var_index(std::size_t n, double alpha);

/// m-th order statistic.
double value_at_risk(std::vector<double> losses, double alpha);

/// Mean of the order statistics strictly above position m; the maximum when
/// that tail is empty. Requires n * (1 - alpha) >= 1.
double expected_shortfall(std::vector<double> losses, double alpha);

enum class Method { CdmMc, CdmSobol, GanSobol, GanLhd, GanOaLhd, GanMc };

inline constexpr Method kAllMethods[] = {Method::CdmMc,  Method::CdmSobol, Method::GanSobol,
                                         Method::GanLhd, Method::GanOaLhd, Method::GanMc};

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
bool needs_model(Method m);
/// Input design used by the method: random, sobol, lhd or oalhd.
std::string_view design_label(Method m);

struct StudyRecord {
  Method method;
  std::size_t n;
  std::size_t replication;
  double estimate;
};

struct StudySummary {
  Method method;
  std::size_t n;
  std::optional<double> sd;  // empty when fewer than two replications
};

struct StudyConfig {
  EsSpec es;
  copulas::CopulaSpec copula = copulas::CopulaSpec::clayton(2.0 / 3.0, 3);
  std::vector<Method> methods{Method::CdmMc, Method::CdmSobol};
  std::vector<std::size_t> n_grid{1000, 2000, 5000, 10000};
  std::size_t replications = 25;
  std::uint64_t master_seed = 0;
  designs::Randomization sobol_randomization = designs::Randomization::DigitalShift;
  std::size_t threads = 1;
};

struct StudyResult {
  std::vector<StudyRecord> records;    // sorted by method, n, replication
  std::vector<StudySummary> summary;   // sorted by method, n
  std::vector<std::string> skipped;    // one reason per infeasible (method, n)
};

/// mix64(master ^ hash_name(method) ^ r).
std::uint64_t replication_seed(std::uint64_t master, Method m, std::size_t r);

/// Copula sample of size n produced by one method's pipeline.
Matrix method_sample(Method m, std::size_t n, std::uint64_t seed, const copulas::CopulaSpec& copula,
                     const gan::GanModel* model, designs::Randomization sobol_randomization);

/// Reason the combination cannot run, or empty when it can.
std::string infeasibility(Method m, std::size_t n, const StudyConfig& config, const gan::GanModel* model);

StudyResult variance_study(const StudyConfig& config, const gan::GanModel* model = nullptr);

std::string records_csv(const StudyResult& result);
std::string summary_csv(const StudyResult& result);
/// Line chart of log10(sd) against log10(n), one series per method.
std::string summary_svg(const StudyResult& result);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Sample standard deviation with the B-1 denominator.
std::optional<double> sample_sd(const std::vector<double>& values);

}  // namespace gqrs::risk
