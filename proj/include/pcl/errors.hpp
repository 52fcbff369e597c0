#ifndef PCL_ERRORS_HPP
#define PCL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcl {

enum class ErrorCode {
  EmptySet,
  EmptyIntersection,
  NotOnSigma,
  WouldDisconnectAll,
  GlueOutsideDomain,
  MeshFailure,
  SolverStalled,
  NoFeasibleMove,
  Disconnected,
  NotACertificate,
  NotAdmissible,
  NotAChordConfiguration,
  InvalidConfig,
  Precondition,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::NotOnSigma: return "NotOnSigma";
    case ErrorCode::WouldDisconnectAll: return "WouldDisconnectAll";
    case ErrorCode::GlueOutsideDomain: return "GlueOutsideDomain";
    case ErrorCode::MeshFailure: return "MeshFailure";
    case ErrorCode::SolverStalled: return "SolverStalled";
    case ErrorCode::NoFeasibleMove: return "NoFeasibleMove";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NotACertificate: return "NotACertificate";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::NotAChordConfiguration: return "NotAChordConfiguration";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Precondition: return "Precondition";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Carries the last residual of a stalled nonlinear solve.
class SolverStalledError : public Error {
 public:
  SolverStalledError(double residual, const std::string& what)
      : Error(ErrorCode::SolverStalled, what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace pcl

#endif
