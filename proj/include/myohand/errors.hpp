#ifndef MYOHAND_ERRORS_HPP
#define MYOHAND_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace myohand {

enum class ErrorCode {
  PointInsideCircle,
  ParallelAxis,
  UnreachableClosure,
  SingularConfiguration,
  EmptyStroke,
  AllSingular,
  NonPositiveSpeed,
  CalibrationInfeasible,
  RouteDegenerate,
  SlackCable,
  AmbiguousRoot,
  KinematicsInfeasible,
  NoFeasiblePoint,
  ParseError,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::PointInsideCircle: return "PointInsideCircle";
    case ErrorCode::ParallelAxis: return "ParallelAxis";
    case ErrorCode::UnreachableClosure: return "UnreachableClosure";
    case ErrorCode::SingularConfiguration: return "SingularConfiguration";
    case ErrorCode::EmptyStroke: return "EmptyStroke";
    case ErrorCode::AllSingular: return "AllSingular";
    case ErrorCode::NonPositiveSpeed: return "NonPositiveSpeed";
    case ErrorCode::CalibrationInfeasible: return "CalibrationInfeasible";
    case ErrorCode::RouteDegenerate: return "RouteDegenerate";
    case ErrorCode::SlackCable: return "SlackCable";
    case ErrorCode::AmbiguousRoot: return "AmbiguousRoot";
    case ErrorCode::KinematicsInfeasible: return "KinematicsInfeasible";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Every domain failure in the library is reported through this type; the
/// code identifies the failure class, what() carries the details.
class MechanismError : public std::runtime_error {
 public:
  MechanismError(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw MechanismError(code, detail);
}

}  // namespace myohand

#endif  // MYOHAND_ERRORS_HPP
