#include "qprep/pipeline.hpp"

#include <algorithm>
#include <random>

#include "json.hpp"

namespace qprep {
namespace {

using nlohmann::json;

struct StageRun {
    StateVector psi_T;
    std::vector<StateVector> snapshots;
    std::vector<StageObservation> stages;
};

StageRun run_stages(const OraclePack& pack, const TargetSpec& spec, const PreparationPlan& plan,
                    bool record) {
    StageRun run;
    run.psi_T = StateVector::uniform(spec.num_qubits());
    StateVector& state = run.psi_T;
    for (const auto& stage : plan.stages) {
        const int k = stage.k;
        const auto good = [&pack, k](std::uint64_t x) { return pack.amp_bit(k, x) != 0; };

        std::optional<biham::RotationParams> rotation;
        if (stage.solutions > 0 && stage.solutions < pack.domain_size()) {
            rotation = biham::rotation_params(biham::split_averages(state, good));
        }
        grover(state, good, stage.t);

        StageObservation obs = observe_stage(state, pack, k, run.stages);
        obs.rotation = rotation;
        run.stages.push_back(std::move(obs));
        if (record) run.snapshots.push_back(state);
    }
    return run;
}

json check_to_json(const BoundCheck& check) {
    return {{"name", check.name},
            {"measured", check.measured},
            {"bound", check.bound},
            {"relation", std::string(to_string(check.relation))},
            {"status", std::string(to_string(check.status))}};
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json optionals_to_json(const std::vector<std::optional<double>>& values) {
    json out = json::array();
    for (const auto& v : values) out.push_back(optional_to_json(v));
    return out;
}

}  // namespace

RunArtifacts prepare(const RunConfig& config) {
    const TargetSpec& spec = config.spec;
    require_valid(spec);
    if (spec.aux_qubits < 1) {
        throw Error(ErrorCode::InvalidArgument, "the pipeline needs a >= 1 auxiliary qubit");
    }
    if (config.mode == MeasurementMode::Sample && config.max_retries < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_retries must be >= 1 in sample mode");
    }
    const OraclePack pack = count_classes(spec, config.max_amplitudes);

    RunArtifacts artifacts;
    artifacts.plan = compute_schedule(pack, spec, config.schedule);

    std::mt19937_64 rng(config.seed);
    const int attempts = config.mode == MeasurementMode::Sample ? config.max_retries : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        StageRun run = run_stages(pack, spec, artifacts.plan, config.record_intermediate);
        MeasurementOutcome outcome = measure_aux(run.psi_T, spec.aux_qubits, config.mode, &rng);
        if (!outcome.success) continue;

        artifacts.psi_T = std::move(run.psi_T);
        artifacts.snapshots = std::move(run.snapshots);
        artifacts.stages = std::move(run.stages);
        artifacts.psi_tilde_r = *outcome.post_state;
        artifacts.outcome = std::move(outcome);
        artifacts.psi_tilde = artifacts.psi_tilde_r;
        apply_phase_stage(artifacts.psi_tilde, spec);
        artifacts.retries_used = attempt;
        return artifacts;
    }
    throw Error(ErrorCode::RetriesExhausted,
                "auxiliary measurement failed " + std::to_string(attempts) + " times");
}

std::vector<BoundCheck> RunReport::all_checks() const {
    std::vector<BoundCheck> checks = bounds.checks;
    checks.insert(checks.end(), delta_b.checks.begin(), delta_b.checks.end());
    checks.push_back(phase.check);
    return checks;
}

bool RunReport::any_violated() const {
    const auto checks = all_checks();
    return std::any_of(checks.begin(), checks.end(),
                       [](const BoundCheck& c) { return c.status == BoundStatus::Violated; });
}

RunReport run_report(const RunConfig& config) {
    RunReport report;
    report.config = config;
    report.artifacts = prepare(config);
    const OraclePack pack = count_classes(config.spec, config.max_amplitudes);
    report.features =
        features_from_stages(report.artifacts.psi_T, pack, config.spec, report.artifacts.stages);
    report.bounds = evaluate_bounds(config.spec, report.artifacts, report.features);
    report.delta_b = delta_b_decomposition(config.spec, pack, report.features);
    report.phase = phase_error_bound(config.spec);
    return report;
}

std::string run_report_to_json(const RunReport& report) {
    const RunConfig& config = report.config;
    const TargetSpec& spec = config.spec;
    const RunArtifacts& art = report.artifacts;

    json doc;
    doc["config"] = {
        {"N", spec.n_states},
        {"T", spec.amp_bits},
        {"T'", spec.phase_bits},
        {"a", spec.aux_qubits},
        {"eta", spec.eta},
        {"convention", std::string(to_string(config.schedule.convention))},
        {"rounding", std::string(to_string(config.schedule.rounding))},
        {"mode", config.mode == MeasurementMode::Project ? "project" : "sample"},
        {"seed", config.seed},
        {"max_retries", config.max_retries},
    };
    doc["plan"] = json::parse(plan_to_json(art.plan));
    doc["retries_used"] = art.retries_used;
    doc["fidelity"] = {{"real_pre", report.bounds.fid_real_pre},
                       {"real_post", report.bounds.fid_real_post},
                       {"total", report.bounds.fid_total}};
    doc["p_fail"] = report.bounds.p_fail;
    doc["p_fail_from_offset"] = report.bounds.p_fail_from_offset;
    doc["bounds"] = {{"fid_pre", report.bounds.bound_fid_pre},
                     {"p_fail", report.bounds.bound_p_fail},
                     {"total", report.bounds.bound_total},
                     {"alpha_squared", report.bounds.alpha_bound},
                     {"feature_error", report.features.h_bound}};
    doc["features"] = {{"b_T", report.features.b_T},
                       {"h", optionals_to_json(report.features.h)},
                       {"h_target", report.features.h_target},
                       {"h_err", optionals_to_json(report.features.h_err)},
                       {"structure_residual", report.features.structure_residual},
                       {"reconstruction_error",
                        optional_to_json(report.features.reconstruction_error)}};
    doc["delta_b"] = {{"max_abs_delta", report.delta_b.max_abs_delta},
                      {"delta_bound", report.delta_b.delta_bound},
                      {"min_b", report.delta_b.min_b},
                      {"max_b", report.delta_b.max_b},
                      {"b_bound", report.delta_b.b_bound},
                      {"u", report.delta_b.u},
                      {"v", report.delta_b.v},
                      {"b_T_bound", report.delta_b.b_T_bound},
                      {"quadratic_residual", report.delta_b.quadratic_residual}};
    doc["phase"] = {{"loss_bound", report.phase.loss_bound},
                    {"truncation_bound", report.phase.truncation_bound},
                    {"max_phase_error", report.phase.max_phase_error}};

    json stages = json::array();
    for (const auto& s : art.stages) {
        json row = {{"k", s.k},
                    {"b", s.b},
                    {"h", optional_to_json(s.h)},
                    {"residual", s.residual},
                    {"class_spread", s.class_spread},
                    {"max_imag", s.max_imag}};
        if (s.rotation) {
            row["omega"] = s.rotation->omega;
            row["alpha"] = s.rotation->alpha;
            row["phi_angle"] = s.rotation->phi_angle;
        }
        stages.push_back(std::move(row));
    }
    doc["stages"] = std::move(stages);

    json checks = json::array();
    for (const auto& c : report.all_checks()) checks.push_back(check_to_json(c));
    doc["checks"] = std::move(checks);
    doc["verdict"] = report.any_violated() ? "FAIL" : "PASS";
    return doc.dump(2);
}

}  // namespace qprep
