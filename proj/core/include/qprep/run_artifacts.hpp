#pragma once

#include <optional>
#include <vector>

#include "qprep/biham.hpp"
#include "qprep/scheduler.hpp"
#include "qprep/statevector.hpp"

namespace qprep {

// What the state looked like right after Grover stage k.
struct StageObservation {
    int k = 0;
    double b = 0.0;                 // B^k: amplitude on the auxiliary region
    std::optional<double> h;        // feature built by stage k; empty when N_k = 0
    double residual = 0.0;          // max deviation from B^k + sum_{j<=k} c_j h_j
    double class_spread = 0.0;      // max amplitude spread inside one level-k class
    double max_imag = 0.0;
    // Rotation of the oracle-O_k averages at the start of the stage.
    std::optional<biham::RotationParams> rotation;
};

struct RunArtifacts {
    PreparationPlan plan;
    StateVector psi_T;        // before the auxiliary measurement
    MeasurementOutcome outcome;
    StateVector psi_tilde_r;  // post-selected real-amplitude payload state
    StateVector psi_tilde;    // after the phase stage
    std::vector<StateVector> snapshots;  // psi^1..psi^T when recorded
    std::vector<StageObservation> stages;
    int retries_used = 0;
};

}  // namespace qprep
