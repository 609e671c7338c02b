#pragma once

#include <stdexcept>
#include <string>

namespace interdict {

enum class Errc {
  CycleDetected,
  DestinationUnreachable,
  CriticalEndpoint,
  BadBounds,
  EmptySubgraph,
  InvalidParams,
  InfeasibleStrategy,
  InfeasibleConstraints,
  NumericalUnderflow,
  RestrictedUndefined,
  PathExplosion,
  StepTooLarge,
  TooManyCriticalNodes,
  BracketFailure,
  DeadEnd,
  IoError,
};

/// All library failures are thrown as Error; `code()` identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::DestinationUnreachable: return "DestinationUnreachable";
    case Errc::CriticalEndpoint: return "CriticalEndpoint";
    case Errc::BadBounds: return "BadBounds";
    case Errc::EmptySubgraph: return "EmptySubgraph";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::InfeasibleStrategy: return "InfeasibleStrategy";
    case Errc::InfeasibleConstraints: return "InfeasibleConstraints";
    case Errc::NumericalUnderflow: return "NumericalUnderflow";
    case Errc::RestrictedUndefined: return "RestrictedUndefined";
    case Errc::PathExplosion: return "PathExplosion";
    case Errc::StepTooLarge: return "StepTooLarge";
    case Errc::TooManyCriticalNodes: return "TooManyCriticalNodes";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::DeadEnd: return "DeadEnd";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

}  // namespace interdict
