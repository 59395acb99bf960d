// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// errors.hpp: error taxonomy shared by the library, the C API, and the CLI.

#pragma once

#include <stdexcept>
#include <string>

namespace isac {

/// Stable error categories. The numeric process exit codes derive from these:
/// 0 success, 2 infeasible, 3 numerical failure, 4 bad input.
enum class ErrorCode {
  kBadInput,               ///< malformed scenario/arguments/file contents
  kNoVisibleContour,       ///< ray casting found no visible contour sample
  kDelayOverflow,          ///< echo delay exceeds the observation window
  kInfeasible,             ///< certified infeasible optimization problem
  kExtractionFailed,       ///< every randomization epoch was rejected
  kNumericalFailure,       ///< solver did not converge / lost precision
  kDegenerateBeampattern,  ///< some a_k^H R_x a_k is numerically zero
  kSingularEfim,           ///< effective Fisher information not invertible
  kSingularPathLossInfo,   ///< path-loss Fisher scalar not positive
  kInternal,               ///< invariant violation (a bug, not bad data)
};

/// Process exit code for an error category (stable CLI/API contract).
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kExtractionFailed:
      return 2;
    case ErrorCode::kNumericalFailure:
    case ErrorCode::kDegenerateBeampattern:
    case ErrorCode::kSingularEfim:
    case ErrorCode::kSingularPathLossInfo:
    case ErrorCode::kInternal:
      return 3;
    case ErrorCode::kBadInput:
    case ErrorCode::kNoVisibleContour:
    case ErrorCode::kDelayOverflow:
      return 4;
  }
  return 3;
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadInput: return "bad-input";
    case ErrorCode::kNoVisibleContour: return "no-visible-contour";
    case ErrorCode::kDelayOverflow: return "delay-overflow";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kExtractionFailed: return "extraction-failed";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kDegenerateBeampattern: return "degenerate-beampattern";
    case ErrorCode::kSingularEfim: return "singular-efim";
    case ErrorCode::kSingularPathLossInfo: return "singular-path-loss-info";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

/// Exception carrying an ErrorCode; everything thrown on purpose by the
/// library derives from this so the C boundary can translate uniformly.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// Precondition check for caller-supplied data (throws kBadInput).
inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kBadInput, what);
}

}  // namespace isac
