#include "nfbp/error.hpp"

namespace nfbp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPlanarShift: return "NonPlanarShift";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::WrongBranch: return "WrongBranch";
    case ErrorCode::StencilCrossesPlane: return "StencilCrossesPlane";
    case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::ScattererOnAperture: return "ScattererOnAperture";
    case ErrorCode::FrequencyMismatch: return "FrequencyMismatch";
    case ErrorCode::PairingMismatch: return "PairingMismatch";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nfbp
