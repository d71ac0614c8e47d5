#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace thetasing {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};

/// Relative singular-value cutoff used for every numerical rank decision.
inline constexpr double kRankEps = 1e-8;
/// Below this (reduced coordinates) a shift or torus coordinate counts as zero.
inline constexpr double kUFloor = 1e-4;

enum class ErrorCode {
  InvalidInput,
  NotSymmetric,
  NotPositiveDefinite,
  OrderTooHigh,
  IndexOutOfRange,
  SolverBudgetExceeded,
  NotSingular,
  OrderMismatch,
  BasePointNotSingular,
  ZeroLeadingCoefficient,
  ZeroShift,
  NotAVerticalSingularity,
  DegeneratePencil,
  ConstantVertex,
  UnluckySubspace,
  EmptySolutionSpace,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thetasing
