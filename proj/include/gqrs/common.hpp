#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gqrs {

/// Row-major dense matrix; rows are points/samples, columns are coordinates.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorKind {
  InvalidArgument,
  DimensionUnsupported,
  DimensionMismatch,
  Domain,
  Infeasible,
  Convergence,
  NonFinite,
  Format,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

/// Smallest and largest doubles used when a value must lie strictly inside (0,1).
inline constexpr double kOpenUnitLow = 0x1p-53;
inline constexpr double kOpenUnitHigh = 1.0 - 0x1p-53;

}  // namespace gqrs
