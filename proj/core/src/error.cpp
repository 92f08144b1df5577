#include "qprep/error.hpp"

namespace qprep {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
        case ErrorCode::ProbabilityNotNormalized: return "ProbabilityNotNormalized";
        case ErrorCode::EtaConstraintViolated: return "EtaConstraintViolated";
        case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DomainTooLarge: return "DomainTooLarge";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::AllMassInAuxRegion: return "AllMassInAuxRegion";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::NoRealRoot: return "NoRealRoot";
        case ErrorCode::OutOfBranch: return "OutOfBranch";
        case ErrorCode::StructureViolation: return "StructureViolation";
        case ErrorCode::RetriesExhausted: return "RetriesExhausted";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace qprep
