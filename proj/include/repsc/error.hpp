#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repsc {

/// Failure categories raised by the library. Each maps onto one named error
/// of the public contract so callers can branch without string matching.
enum class ErrorCode {
  NonSquare,
  NotSymmetric,
  NonFinite,
  EmptyMatrix,
  NoConvergence,
  NotPositiveDefinite,
  RankTooLarge,
  DivisibilityViolated,
  DegreeOutOfRange,
  InvalidParameter,
  SizeMismatch,
  EmptyCluster,
  ZeroVolumeCluster,
  IsolatedNode,
  NullSpaceTooSmall,
  KTooLarge,
  AssumptionViolated,
  ZeroGap,
  MalformedLine,
  IndexOutOfRange,
  LayerOutOfRange,
  NoLayers,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::DivisibilityViolated: return "DivisibilityViolated";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::ZeroVolumeCluster: return "ZeroVolumeCluster";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::NullSpaceTooSmall: return "NullSpaceTooSmall";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::ZeroGap: return "ZeroGap";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::NoLayers: return "NoLayers";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace repsc
