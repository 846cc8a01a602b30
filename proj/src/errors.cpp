#include "flagdyn/errors.hpp"

namespace flagdyn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotUnitaryFrame: return "NotUnitaryFrame";
    case ErrorCode::NotFrame: return "NotFrame";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::OddAmbient: return "OddAmbient";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::NotProjector: return "NotProjector";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::NotLinked: return "NotLinked";
    case ErrorCode::NotSimpleSpectrum: return "NotSimpleSpectrum";
    case ErrorCode::WeightsNotStrict: return "WeightsNotStrict";
    case ErrorCode::BadSizes: return "BadSizes";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
  }
  return "Unknown";
}

}  // namespace flagdyn
