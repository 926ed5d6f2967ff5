#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sinv {

enum class ErrorCode {
  InvalidGraph,
  InvalidIOConfig,
  NonSelectionMatrix,
  ParseError,
  EmptyGraph,
  InvalidSystem,
  SystemTooLarge,
  NoWitness,
  InvalidDegree,
  InvalidGamma,
  Stall,
  NotInvertible,
  TooManyNodesRequested,
  ConfigError,
  InvalidArgument,
  NonFinite,
  Diverged,
  NoBracket,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure is reported through this exception; `code()` lets
/// callers (and the CLI exit-code mapping) tell the cases apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InvalidIOConfig: return "InvalidIOConfig";
    case ErrorCode::NonSelectionMatrix: return "NonSelectionMatrix";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::SystemTooLarge: return "SystemTooLarge";
    case ErrorCode::NoWitness: return "NoWitness";
    case ErrorCode::InvalidDegree: return "InvalidDegree";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::Stall: return "Stall";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::TooManyNodesRequested: return "TooManyNodesRequested";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::NoBracket: return "NoBracket";
  }
  return "Unknown";
}

}  // namespace sinv
