#pragma once

#include <cstdint>
#include <string>

#include "qprep/analysis.hpp"
#include "qprep/run_artifacts.hpp"
#include "qprep/scheduler.hpp"
#include "qprep/target_model.hpp"

namespace qprep {

struct RunConfig {
    TargetSpec spec;
    ScheduleOptions schedule;
    MeasurementMode mode = MeasurementMode::Project;
    std::uint64_t seed = 0;
    int max_retries = 16;          // total preparation attempts in sample mode
    bool record_intermediate = false;
    std::uint64_t max_amplitudes = kDefaultMaxAmplitudes;
};

// Psi^0 -> G(O_1, t_1) ... G(O_T, t_T) -> auxiliary measurement -> U_1 ... U_T'.
// Sample mode re-prepares from Psi^0 after each failed measurement and throws
// RetriesExhausted after max_retries attempts. Requires a >= 1.
RunArtifacts prepare(const RunConfig& config);

struct RunReport {
    RunConfig config;
    RunArtifacts artifacts;
    FeatureReport features;
    BoundsReport bounds;
    DeltaBReport delta_b;
    PhaseReport phase;

    // Every bound check across the report, phase truncation included.
    std::vector<BoundCheck> all_checks() const;
    bool any_violated() const;
};

RunReport run_report(const RunConfig& config);

// Deterministic JSON: identical reports serialize to identical bytes.
std::string run_report_to_json(const RunReport& report);

}  // namespace qprep
