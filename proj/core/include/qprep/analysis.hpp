#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qprep/run_artifacts.hpp"
#include "qprep/target_model.hpp"

namespace qprep {

inline constexpr double kStructureTolerance = 1e-9;
inline constexpr double kPairSpreadTolerance = 1e-6;

// Realized features of the pre-measurement state against their targets 2^-k / sqrt(eta N).
struct FeatureReport {
    double b_T = 0.0;
    std::vector<std::optional<double>> h;      // h_1..h_T
    std::vector<double> h_target;
    std::vector<std::optional<double>> h_err;
    double h_bound = 0.0;                      // 2^{1-a/2} / sqrt(eta N)
    double structure_residual = 0.0;
    std::optional<double> reconstruction_error;
};

// Single-state extraction. h_j is the class amplitude difference across
// prefix pairs that differ only in bit j; with no such pair h_j is left empty.
// Throws StructureViolation if the state is not real and piecewise constant on
// level-T classes, or if pairs disagree on h_j by more than 1e-6.
FeatureReport extract_features(const StateVector& state, const OraclePack& pack,
                               const TargetSpec& spec);

// Feature built by stage k, read off the state right after that stage given
// the features of the earlier stages.
StageObservation observe_stage(const StateVector& state, const OraclePack& pack, int k,
                               std::span<const StageObservation> earlier);

// Max over level-k classes of the amplitude spread inside the class; the
// auxiliary region belongs to the all-zero class.
double class_spread(const StateVector& state, const OraclePack& pack, int level);

FeatureReport features_from_stages(const StateVector& psi_T, const OraclePack& pack,
                                   const TargetSpec& spec,
                                   std::span<const StageObservation> stages);

// Staged extraction from recorded snapshots psi^1..psi^T. Throws
// StructureViolation when any stage residual exceeds 1e-9.
FeatureReport extract_features_staged(std::span<const StateVector> snapshots,
                                      const OraclePack& pack, const TargetSpec& spec);

// sqrt(p(x)) on log2 N qubits.
StateVector real_target(const TargetSpec& spec);
// sqrt(p(x)) exp(2 pi i phi(x)) on log2 N qubits.
StateVector full_target(const TargetSpec& spec);

enum class BoundStatus { Holds, Violated, NotApplicable };
enum class Relation { Less, LessEqual, Greater, GreaterEqual };

std::string_view to_string(BoundStatus status) noexcept;
std::string_view to_string(Relation relation) noexcept;
bool relation_holds(Relation relation, double measured, double bound);

struct BoundCheck {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    Relation relation = Relation::LessEqual;
    BoundStatus status = BoundStatus::NotApplicable;
};

BoundCheck make_check(std::string name, double measured, Relation relation, double bound,
                      bool applicable = true);

struct BoundsReport {
    double fid_real_pre = 0.0;   // |<psi_r|psi^T>|
    double fid_real_post = 0.0;  // |<psi_r|psi~_r>|
    double fid_total = 0.0;      // |<psi~|psi>|
    double p_fail = 0.0;
    double p_fail_from_offset = 0.0;  // (2^a N - N) |B^T|^2
    double bound_fid_pre = 0.0;       // 1 - 3 T 2^{-a/2} / eta
    double bound_p_fail = 0.0;        // 16 T 2^{-a/2} / eta
    double bound_total = 0.0;         // bound_fid_pre (1 - 2^{-2T'-1})
    double alpha_bound = 0.0;         // 4 / (eta 2^a N)
    std::vector<BoundCheck> checks;

    bool any_violated() const;
};

double bound_fid_pre(int amp_bits, int aux_qubits, double eta);
double bound_p_fail(int amp_bits, int aux_qubits, double eta);
double bound_total(int amp_bits, int phase_bits, int aux_qubits, double eta);
double alpha_squared_bound(int aux_qubits, double eta, std::uint64_t n_states);
double feature_error_bound(int aux_qubits, double eta, std::uint64_t n_states);

// Measured fidelities and failure probability against every guarantee. Vacuous
// bounds are reported as not applicable rather than asserted.
BoundsReport evaluate_bounds(const TargetSpec& spec, const RunArtifacts& artifacts,
                             const FeatureReport& features);

struct DeltaBReport {
    double max_abs_delta = 0.0;
    double delta_bound = 0.0;   // 2 T 2^{-a/2} / sqrt(eta N)
    double min_b = 0.0;
    double max_b = 0.0;
    double b_bound = 0.0;       // 2^-T / sqrt(eta N)
    double u = 0.0;
    double v = 0.0;
    double b_T = 0.0;
    double b_T_bound = 0.0;     // 4 sqrt(T) 2^{-3a/4} / sqrt(eta N)
    double quadratic_residual = 0.0;  // (B^T)^2 + 2 U B^T + V
    std::vector<BoundCheck> checks;
};

// delta(x) = sum_{j<=T} c_j(x)(h_j - 2^-j / sqrt(eta N)),
// b(x) = sum_{j>T} c_j(x) 2^-j / sqrt(eta N) truncated at bit 52, and the
// normalization quadratic for B^T built from them.
DeltaBReport delta_b_decomposition(const TargetSpec& spec, const OraclePack& pack,
                                   const FeatureReport& features);

struct PhaseReport {
    double loss_bound = 0.0;        // 2^{-2T'-1}
    double truncation_bound = 0.0;  // 2^{-T'}
    double max_phase_error = 0.0;   // max_x |phi(x) - phi~(x)|
    BoundCheck check;
};

PhaseReport phase_error_bound(const TargetSpec& spec);

}  // namespace qprep
