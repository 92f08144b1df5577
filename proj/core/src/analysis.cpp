#include "qprep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qprep/scheduler.hpp"

namespace qprep {
namespace {

constexpr double kIdentityTolerance = 1e-10;
constexpr double kPhaseChainSlack = 1e-12;
constexpr double kQuadraticTolerance = 1e-9;

void require_aux(const OraclePack& pack) {
    if (pack.domain_size() == pack.payload_size()) {
        throw Error(ErrorCode::InvalidArgument, "feature extraction needs a >= 1 auxiliary qubit");
    }
}

double target_feature(const TargetSpec& spec, int k) {
    return std::ldexp(feature_unit(spec), -k);
}

std::vector<double> target_features(const TargetSpec& spec) {
    std::vector<double> out;
    for (int k = 1; k <= spec.amp_bits; ++k) out.push_back(target_feature(spec, k));
    return out;
}

// Largest |amp(x) - B^T| over the auxiliary region.
double aux_deviation(const StateVector& state, const OraclePack& pack, double b) {
    double dev = 0.0;
    for (std::uint64_t x = pack.payload_size(); x < state.size(); ++x) {
        dev = std::max(dev, std::abs(state[x] - Amplitude{b, 0.0}));
    }
    return dev;
}

// max_x |amp(x) - (B + sum_j c_j(x) h_j)|, or empty when a needed h_j is undefined.
std::optional<double> reconstruction_error(const StateVector& state, const OraclePack& pack,
                                           double b,
                                           std::span<const std::optional<double>> h) {
    double err = aux_deviation(state, pack, b);
    for (std::uint64_t x = 0; x < pack.payload_size(); ++x) {
        double model = b;
        for (int j = 1; j <= pack.amp_bits(); ++j) {
            if (!pack.amp_bit(j, x)) continue;
            const auto& hj = h[static_cast<std::size_t>(j - 1)];
            if (!hj) return std::nullopt;
            model += *hj;
        }
        err = std::max(err, std::abs(state[x] - Amplitude{model, 0.0}));
    }
    return err;
}

void fill_errors(FeatureReport& report) {
    report.h_err.clear();
    for (std::size_t j = 0; j < report.h.size(); ++j) {
        if (report.h[j]) {
            report.h_err.push_back(std::abs(*report.h[j] - report.h_target[j]));
        } else {
            report.h_err.push_back(std::nullopt);
        }
    }
}

}  // namespace

double class_spread(const StateVector& state, const OraclePack& pack, int level) {
    struct Range {
        double re_lo = INFINITY, re_hi = -INFINITY, im_lo = INFINITY, im_hi = -INFINITY;
        void add(Amplitude a) {
            re_lo = std::min(re_lo, a.real());
            re_hi = std::max(re_hi, a.real());
            im_lo = std::min(im_lo, a.imag());
            im_hi = std::max(im_hi, a.imag());
        }
        double spread() const { return std::max(re_hi - re_lo, im_hi - im_lo); }
    };
    std::map<std::uint64_t, Range> ranges;
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        ranges[pack.prefix_of(x, level).bits].add(state[x]);
    }
    double spread = 0.0;
    for (const auto& [bits, range] : ranges) spread = std::max(spread, range.spread());
    return spread;
}

FeatureReport extract_features(const StateVector& state, const OraclePack& pack,
                               const TargetSpec& spec) {
    require_aux(pack);
    if (state.size() != pack.domain_size()) {
        throw Error(ErrorCode::DimensionMismatch, "state does not match the oracle domain");
    }
    if (state.max_imag() > kStructureTolerance) {
        throw Error(ErrorCode::StructureViolation, "amplitudes are not real");
    }
    const int depth = pack.amp_bits();
    const double spread = class_spread(state, pack, depth);
    if (spread > kStructureTolerance) {
        throw Error(ErrorCode::StructureViolation,
                    "amplitudes vary inside a level-T class by " + std::to_string(spread));
    }

    // One representative amplitude per nonempty class; the zero class is the auxiliary region.
    std::map<std::uint64_t, double> amp;
    amp[0] = state[pack.payload_size()].real();
    for (std::uint64_t x = 0; x < pack.payload_size(); ++x) {
        amp.emplace(pack.prefix_of(x, depth).bits, state[x].real());
    }

    FeatureReport report;
    report.b_T = amp[0];
    report.h_target = target_features(spec);
    report.h_bound = feature_error_bound(spec.aux_qubits, spec.eta, spec.n_states);
    for (int j = 1; j <= depth; ++j) {
        const std::uint64_t mask = std::uint64_t{1} << (depth - j);
        double lo = INFINITY, hi = -INFINITY, sum = 0.0;
        int pairs = 0;
        for (const auto& [bits, a_one] : amp) {
            if (!(bits & mask)) continue;
            const auto partner = amp.find(bits ^ mask);
            if (partner == amp.end()) continue;
            const double diff = a_one - partner->second;
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
            sum += diff;
            ++pairs;
        }
        if (pairs == 0) {
            report.h.push_back(std::nullopt);
            continue;
        }
        if (hi - lo > kPairSpreadTolerance) {
            throw Error(ErrorCode::StructureViolation,
                        "feature h_" + std::to_string(j) + " differs across prefix pairs by " +
                            std::to_string(hi - lo));
        }
        report.structure_residual = std::max(report.structure_residual, hi - lo);
        report.h.push_back(sum / pairs);
    }
    fill_errors(report);
    report.reconstruction_error = reconstruction_error(state, pack, report.b_T, report.h);
    return report;
}

StageObservation observe_stage(const StateVector& state, const OraclePack& pack, int k,
                               std::span<const StageObservation> earlier) {
    require_aux(pack);
    if (state.size() != pack.domain_size()) {
        throw Error(ErrorCode::DimensionMismatch, "state does not match the oracle domain");
    }
    StageObservation obs;
    obs.k = k;
    obs.b = state[pack.payload_size()].real();
    obs.max_imag = state.max_imag();
    obs.class_spread = class_spread(state, pack, k);

    // residual_x = A(x) - B^k - sum_{j<k} c_j(x) h_j
    std::vector<double> good_residuals;
    double bad_residual = aux_deviation(state, pack, obs.b);
    for (std::uint64_t x = 0; x < pack.payload_size(); ++x) {
        double r = state[x].real() - obs.b;
        for (const auto& prior : earlier) {
            if (prior.k < k && prior.h && pack.amp_bit(prior.k, x)) r -= *prior.h;
        }
        if (pack.amp_bit(k, x)) {
            good_residuals.push_back(r);
        } else {
            bad_residual = std::max(bad_residual, std::abs(r));
        }
    }
    obs.residual = std::max(bad_residual, obs.max_imag);
    if (!good_residuals.empty()) {
        const double h = pairwise_sum(good_residuals) / static_cast<double>(good_residuals.size());
        for (double r : good_residuals) obs.residual = std::max(obs.residual, std::abs(r - h));
        obs.h = h;
    }
    return obs;
}

FeatureReport features_from_stages(const StateVector& psi_T, const OraclePack& pack,
                                   const TargetSpec& spec,
                                   std::span<const StageObservation> stages) {
    require_aux(pack);
    FeatureReport report;
    report.b_T = psi_T[pack.payload_size()].real();
    report.h_target = target_features(spec);
    report.h_bound = feature_error_bound(spec.aux_qubits, spec.eta, spec.n_states);
    report.h.assign(static_cast<std::size_t>(spec.amp_bits), std::nullopt);
    for (const auto& s : stages) {
        report.h[static_cast<std::size_t>(s.k - 1)] = s.h;
        report.structure_residual = std::max(report.structure_residual, s.residual);
    }
    fill_errors(report);
    report.reconstruction_error = reconstruction_error(psi_T, pack, report.b_T, report.h);
    return report;
}

FeatureReport extract_features_staged(std::span<const StateVector> snapshots,
                                      const OraclePack& pack, const TargetSpec& spec) {
    if (snapshots.size() != static_cast<std::size_t>(pack.amp_bits())) {
        throw Error(ErrorCode::InvalidArgument, "need one snapshot per stage");
    }
    std::vector<StageObservation> stages;
    for (int k = 1; k <= pack.amp_bits(); ++k) {
        auto obs = observe_stage(snapshots[static_cast<std::size_t>(k - 1)], pack, k, stages);
        if (obs.residual > kStructureTolerance) {
            throw Error(ErrorCode::StructureViolation,
                        "stage " + std::to_string(k) + " departs from B + sum c_j h_j by " +
                            std::to_string(obs.residual));
        }
        stages.push_back(std::move(obs));
    }
    return features_from_stages(snapshots.back(), pack, spec, stages);
}

StateVector real_target(const TargetSpec& spec) {
    std::vector<Amplitude> amps(spec.n_states);
    for (std::uint64_t x = 0; x < spec.n_states; ++x) amps[x] = std::sqrt(spec.probs[x]);
    return StateVector(std::move(amps));
}

StateVector full_target(const TargetSpec& spec) {
    std::vector<Amplitude> amps(spec.n_states);
    for (std::uint64_t x = 0; x < spec.n_states; ++x) {
        amps[x] = std::polar(std::sqrt(spec.probs[x]), 2.0 * std::numbers::pi * spec.phases[x]);
    }
    return StateVector(std::move(amps));
}

std::string_view to_string(BoundStatus status) noexcept {
    switch (status) {
        case BoundStatus::Holds: return "holds";
        case BoundStatus::Violated: return "violated";
        case BoundStatus::NotApplicable: return "not_applicable";
    }
    return "not_applicable";
}

std::string_view to_string(Relation relation) noexcept {
    switch (relation) {
        case Relation::Less: return "<";
        case Relation::LessEqual: return "<=";
        case Relation::Greater: return ">";
        case Relation::GreaterEqual: return ">=";
    }
    return "<=";
}

bool relation_holds(Relation relation, double measured, double bound) {
    switch (relation) {
        case Relation::Less: return measured < bound;
        case Relation::LessEqual: return measured <= bound;
        case Relation::Greater: return measured > bound;
        case Relation::GreaterEqual: return measured >= bound;
    }
    return false;
}

BoundCheck make_check(std::string name, double measured, Relation relation, double bound,
                      bool applicable) {
    BoundCheck check{std::move(name), measured, bound, relation, BoundStatus::NotApplicable};
    if (applicable) {
        check.status = relation_holds(relation, measured, bound) ? BoundStatus::Holds
                                                                 : BoundStatus::Violated;
    }
    return check;
}

bool BoundsReport::any_violated() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const BoundCheck& c) { return c.status == BoundStatus::Violated; });
}

double bound_fid_pre(int amp_bits, int aux_qubits, double eta) {
    return 1.0 - 3.0 * amp_bits * std::exp2(-0.5 * aux_qubits) / eta;
}

double bound_p_fail(int amp_bits, int aux_qubits, double eta) {
    return 16.0 * amp_bits * std::exp2(-0.5 * aux_qubits) / eta;
}

double bound_total(int amp_bits, int phase_bits, int aux_qubits, double eta) {
    return bound_fid_pre(amp_bits, aux_qubits, eta) * (1.0 - std::ldexp(1.0, -2 * phase_bits - 1));
}

double alpha_squared_bound(int aux_qubits, double eta, std::uint64_t n_states) {
    return 4.0 / (eta * std::ldexp(static_cast<double>(n_states), aux_qubits));
}

double feature_error_bound(int aux_qubits, double eta, std::uint64_t n_states) {
    return std::exp2(1.0 - 0.5 * aux_qubits) / std::sqrt(eta * static_cast<double>(n_states));
}

BoundsReport evaluate_bounds(const TargetSpec& spec, const RunArtifacts& artifacts,
                             const FeatureReport& features) {
    const PreparationPlan& plan = artifacts.plan;
    const int t_bits = spec.amp_bits;
    const int a = spec.aux_qubits;
    const std::uint64_t n = spec.n_states;
    const std::uint64_t domain = spec.domain_size();

    BoundsReport report;
    const StateVector psi_r = real_target(spec);
    {
        std::vector<Amplitude> payload(artifacts.psi_T.amplitudes().begin(),
                                       artifacts.psi_T.amplitudes().begin() +
                                           static_cast<std::ptrdiff_t>(n));
        report.fid_real_pre = std::abs(inner_product(psi_r, StateVector(std::move(payload))));
    }
    report.fid_real_post = fidelity(psi_r, artifacts.psi_tilde_r);
    report.fid_total = fidelity(full_target(spec), artifacts.psi_tilde);
    report.p_fail = artifacts.outcome.p_fail;
    report.p_fail_from_offset = static_cast<double>(domain - n) * features.b_T * features.b_T;
    report.bound_fid_pre = bound_fid_pre(t_bits, a, spec.eta);
    report.bound_p_fail = bound_p_fail(t_bits, a, spec.eta);
    report.bound_total = bound_total(t_bits, spec.phase_bits, a, spec.eta);
    report.alpha_bound = alpha_squared_bound(a, spec.eta, n);

    auto& checks = report.checks;
    checks.push_back(make_check("structure_residual", features.structure_residual,
                                Relation::LessEqual, kStructureTolerance));
    for (const auto& stage : plan.stages) {
        if (stage.skipped) continue;
        const auto& err = features.h_err[static_cast<std::size_t>(stage.k - 1)];
        if (err) {
            checks.push_back(make_check("feature_error[" + std::to_string(stage.k) + "]", *err,
                                        Relation::Less, features.h_bound));
        }
        checks.push_back(make_check("iteration_bound[" + std::to_string(stage.k) + "]",
                                    static_cast<double>(stage.t), Relation::LessEqual,
                                    iteration_bound(domain, stage.solutions)));
        checks.push_back(make_check("omega_bound[" + std::to_string(stage.k) + "]", stage.omega,
                                    Relation::GreaterEqual,
                                    omega_lower_bound(domain, stage.solutions)));
    }
    for (const auto& stage : artifacts.stages) {
        if (!stage.rotation) continue;
        const double alpha = stage.rotation->alpha;
        checks.push_back(make_check("alpha_bound[" + std::to_string(stage.k) + "]", alpha * alpha,
                                    Relation::Less, report.alpha_bound));
    }

    checks.push_back(make_check("fidelity_pre", report.fid_real_pre, Relation::Greater,
                                report.bound_fid_pre, report.bound_fid_pre > 0.0));
    checks.push_back(make_check("fidelity_post", report.fid_real_post, Relation::Greater,
                                report.bound_fid_pre, report.bound_fid_pre > 0.0));
    checks.push_back(make_check("p_fail_identity",
                                std::abs(report.p_fail - report.p_fail_from_offset),
                                Relation::LessEqual, kIdentityTolerance));
    checks.push_back(make_check("p_fail_bound", report.p_fail, Relation::LessEqual,
                                report.bound_p_fail, report.bound_p_fail <= 1.0));
    checks.push_back(make_check(
        "post_measurement_identity",
        std::abs(report.fid_real_post * std::sqrt(1.0 - report.p_fail) - report.fid_real_pre),
        Relation::LessEqual, kIdentityTolerance));
    checks.push_back(make_check("fidelity_total", report.fid_total, Relation::Greater,
                                report.bound_total, report.bound_total > 0.0));
    checks.push_back(make_check(
        "phase_chain", report.fid_total, Relation::GreaterEqual,
        report.fid_real_post * (1.0 - std::ldexp(1.0, -2 * spec.phase_bits - 1)) -
            kPhaseChainSlack));
    return report;
}

DeltaBReport delta_b_decomposition(const TargetSpec& spec, const OraclePack& pack,
                                   const FeatureReport& features) {
    const int t_bits = spec.amp_bits;
    const int a = spec.aux_qubits;
    const double unit = feature_unit(spec);
    const double domain = static_cast<double>(spec.domain_size());

    DeltaBReport report;
    report.delta_bound = 2.0 * t_bits * std::exp2(-0.5 * a) * unit;
    report.b_bound = std::ldexp(unit, -t_bits);
    report.b_T = features.b_T;
    report.b_T_bound = 4.0 * std::sqrt(static_cast<double>(t_bits)) * std::exp2(-0.75 * a) * unit;
    report.min_b = INFINITY;

    double u_sum = 0.0;
    double v_sum = 0.0;
    for (std::uint64_t x = 0; x < spec.n_states; ++x) {
        double delta = 0.0;
        for (int j = 1; j <= t_bits; ++j) {
            if (!pack.amp_bit(j, x)) continue;
            const auto& hj = features.h[static_cast<std::size_t>(j - 1)];
            if (!hj) {
                throw Error(ErrorCode::InvalidArgument,
                            "feature h_" + std::to_string(j) + " is undefined but used");
            }
            delta += *hj - features.h_target[static_cast<std::size_t>(j - 1)];
        }
        double b = 0.0;
        for (int j = t_bits + 1; j <= kMaxDoubleBitDepth; ++j) {
            if (amp_bit(spec, j, x)) b += std::ldexp(unit, -j);
        }
        const double sqrt_p = std::sqrt(spec.probs[x]);
        report.max_abs_delta = std::max(report.max_abs_delta, std::abs(delta));
        report.min_b = std::min(report.min_b, b);
        report.max_b = std::max(report.max_b, b);
        u_sum += sqrt_p + delta - b;
        v_sum += (2.0 * sqrt_p + delta - b) * (delta - b);
    }
    report.u = u_sum / domain;
    report.v = v_sum / domain;
    report.quadratic_residual =
        report.b_T * report.b_T + 2.0 * report.u * report.b_T + report.v;

    auto& checks = report.checks;
    checks.push_back(make_check("delta_bound", report.max_abs_delta, Relation::LessEqual,
                                report.delta_bound));
    checks.push_back(make_check("b_nonnegative", report.min_b, Relation::GreaterEqual, 0.0));
    checks.push_back(make_check("b_bound", report.max_b, Relation::LessEqual, report.b_bound));
    checks.push_back(make_check("offset_bound", std::abs(report.b_T), Relation::LessEqual,
                                report.b_T_bound));
    checks.push_back(make_check("offset_quadratic", std::abs(report.quadratic_residual),
                                Relation::LessEqual, kQuadraticTolerance));
    return report;
}

PhaseReport phase_error_bound(const TargetSpec& spec) {
    PhaseReport report;
    report.loss_bound = std::ldexp(1.0, -2 * spec.phase_bits - 1);
    report.truncation_bound = std::ldexp(1.0, -spec.phase_bits);
    for (std::uint64_t x = 0; x < spec.n_states; ++x) {
        report.max_phase_error =
            std::max(report.max_phase_error, std::abs(spec.phases[x] - truncated_phase(spec, x)));
    }
    report.check = make_check("phase_truncation", report.max_phase_error, Relation::LessEqual,
                              report.truncation_bound);
    return report;
}

}  // namespace qprep
