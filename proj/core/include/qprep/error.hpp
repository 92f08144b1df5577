#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qprep {

enum class ErrorCode {
    NotPowerOfTwo,
    ProbabilityNotNormalized,
    EtaConstraintViolated,
    EtaOutOfRange,
    InvalidArgument,
    DomainTooLarge,
    DimensionMismatch,
    AllMassInAuxRegion,
    DegenerateSplit,
    NoRealRoot,
    OutOfBranch,
    StructureViolation,
    RetriesExhausted,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure surfaces as qprep::Error; callers switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qprep
