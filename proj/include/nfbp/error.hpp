#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nfbp {

enum class ErrorCode {
  InvalidArgument,
  NonPlanarShift,
  ZeroDistance,
  WrongBranch,
  StencilCrossesPlane,
  TruncationInsufficient,
  ScattererOnAperture,
  FrequencyMismatch,
  PairingMismatch,
  EmptyImage,
  DimMismatch,
  EmptyMask,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nfbp
