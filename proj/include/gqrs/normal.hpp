#pragma once

namespace gqrs::qrs {

double normal_pdf(double x);
double normal_cdf(double x);

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step on the erfc-based CDF. Uses Phi^-1(p) = -Phi^-1(1-p) for p > 1/2.
/// Throws ErrorKind::Domain unless 0 < p < 1.
double normal_inverse_cdf(double p);

}  // namespace gqrs::qrs
