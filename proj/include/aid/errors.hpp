#pragma once

#include <stdexcept>
#include <string>

namespace aid {

enum class ErrorCode {
  NotNormalized,
  NotExchangeable,
  EmptySupport,
  GridsDiffer,
  ZeroProbabilitySignal,
  UndefinedSignal,
  WindowUnderflow,
  CouplingInfeasible,
  OutOfWindow,
  WrongPriorClass,
  EpsilonTooLarge,
  AlphaOutOfRange,
  NoFeasibleSignalGap,
  NotProductPrior,
  OutsideTrapezoid,
  InvalidArgument,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NotExchangeable: return "NotExchangeable";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::GridsDiffer: return "GridsDiffer";
    case ErrorCode::ZeroProbabilitySignal: return "ZeroProbabilitySignal";
    case ErrorCode::UndefinedSignal: return "UndefinedSignal";
    case ErrorCode::WindowUnderflow: return "WindowUnderflow";
    case ErrorCode::CouplingInfeasible: return "CouplingInfeasible";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::WrongPriorClass: return "WrongPriorClass";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::NoFeasibleSignalGap: return "NoFeasibleSignalGap";
    case ErrorCode::NotProductPrior: return "NotProductPrior";
    case ErrorCode::OutsideTrapezoid: return "OutsideTrapezoid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace aid
