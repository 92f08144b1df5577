#include "qprep/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "qprep/biham.hpp"

namespace qprep {
namespace {

using nlohmann::json;

struct WeightedMean {
    double weighted_sum = 0.0;
    double weight = 0.0;

    void add(double amp, std::uint64_t count) {
        weighted_sum += amp * static_cast<double>(count);
        weight += static_cast<double>(count);
    }
    double mean() const { return weight > 0.0 ? weighted_sum / weight : 0.0; }
};

// Extended-domain count of the level-k class with prefix bits q.
std::uint64_t extended_count(const OraclePack& pack, int level, std::uint64_t bits) {
    return pack.class_count(Prefix{level, bits}, CountConvention::Extended);
}

}  // namespace

std::string_view to_string(Rounding rounding) noexcept {
    return rounding == Rounding::StructurePreserving ? "structure-preserving" : "nearest";
}

double feature_unit(const TargetSpec& spec) {
    return 1.0 / std::sqrt(spec.eta * static_cast<double>(spec.n_states));
}

double ModelState::amplitude(std::uint64_t prefix_bits) const {
    const auto it = class_amp.find(prefix_bits);
    if (it == class_amp.end()) throw Error(ErrorCode::InvalidArgument, "empty model class");
    return it->second;
}

double ModelState::norm_squared() const {
    double total = 0.0;
    for (const auto& [bits, count] : class_count) {
        const double a = class_amp.at(bits);
        total += static_cast<double>(count) * a * a;
    }
    return total;
}

ModelState model_state(const OraclePack& pack, const TargetSpec& spec, int k) {
    if (k < 0 || k > pack.amp_bits()) {
        throw Error(ErrorCode::InvalidArgument, "model level outside [0, T]");
    }
    const double unit = feature_unit(spec);

    ModelState model;
    model.level = k;
    // Every level has the all-zero class: it holds the auxiliary region.
    model.class_count[0] = extended_count(pack, k, 0);
    for (const auto& [bits, count] : pack.payload_classes(k)) {
        model.class_count[bits] = extended_count(pack, k, bits);
    }

    std::map<std::uint64_t, double> offset;
    double linear = 0.0;    // sum n f
    double quadratic = 0.0; // sum n f^2
    double total = 0.0;     // sum n
    for (const auto& [bits, count] : model.class_count) {
        double f = 0.0;
        const Prefix q{k, bits};
        for (int j = 1; j <= k; ++j) {
            if (q.bit(j)) f += std::ldexp(unit, -j);
        }
        offset[bits] = f;
        const double n = static_cast<double>(count);
        linear += n * f;
        quadratic += n * f * f;
        total += n;
    }

    // total B^2 + 2 linear B + (quadratic - 1) = 0
    const double half_b = linear;
    const double c = quadratic - 1.0;
    const double disc = half_b * half_b - total * c;
    if (disc < 0.0) {
        throw Error(ErrorCode::NoRealRoot,
                    "normalization of the level-" + std::to_string(k) + " model state has no real root");
    }
    const double sq = std::sqrt(disc);
    // Cancellation-free pair of roots; prefer the positive one on a tie.
    double small_root;
    if (half_b == 0.0) {
        small_root = sq / total;
    } else {
        const double q = -(half_b + std::copysign(sq, half_b));
        const double r1 = q / total;
        const double r2 = c / q;
        small_root = std::abs(r1) < std::abs(r2) ? r1 : r2;
    }
    model.b_prime = small_root;
    for (const auto& [bits, f] : offset) model.class_amp[bits] = small_root + f;
    return model;
}

AverageRatios average_ratios(const OraclePack& pack, const TargetSpec& spec, int k,
                             CountConvention convention) {
    if (k < 1 || k > pack.amp_bits()) throw Error(ErrorCode::InvalidArgument, "k outside [1, T]");
    const std::uint64_t solutions = pack.solutions(k);
    if (solutions == 0) throw Error(ErrorCode::DegenerateSplit, "N_k = 0");

    const ModelState before = model_state(pack, spec, k - 1);
    const ModelState after = model_state(pack, spec, k);

    WeightedMean g_ini, b_ini, g_fin, b_fin;
    for (const auto& [bits, count_ext] : after.class_count) {
        const Prefix q{k, bits};
        const std::uint64_t count =
            convention == CountConvention::Extended ? count_ext
                                                    : pack.class_count(q, CountConvention::PaperLiteral);
        const double a_before = before.amplitude(bits >> 1);
        const double a_after = after.amplitude(bits);
        if (q.bit(k)) {
            g_ini.add(a_before, count);
            g_fin.add(a_after, count);
        } else {
            b_ini.add(a_before, count);
            b_fin.add(a_after, count);
        }
    }

    if (convention == CountConvention::Extended) {
        return {biham::average_ratio(g_ini.mean(), b_ini.mean()),
                biham::average_ratio(g_fin.mean(), b_fin.mean())};
    }
    // (N - N_k) sum A N_{q1} / (N_k sum A N_{q0}) with counts over [0, N).
    const double bad_weight = static_cast<double>(pack.payload_size() - solutions);
    const double good_weight = static_cast<double>(solutions);
    return {biham::average_ratio(bad_weight * g_ini.weighted_sum, good_weight * b_ini.weighted_sum),
            biham::average_ratio(bad_weight * g_fin.weighted_sum, good_weight * b_fin.weighted_sum)};
}

double default_skip_cutoff(int aux_qubits, int amp_bits) {
    return std::exp2(-0.5 * aux_qubits) / static_cast<double>(amp_bits);
}

std::vector<std::uint64_t> PreparationPlan::times() const {
    std::vector<std::uint64_t> out;
    for (const auto& s : stages) out.push_back(s.t);
    return out;
}

std::vector<double> PreparationPlan::omegas() const {
    std::vector<double> out;
    for (const auto& s : stages) out.push_back(s.omega);
    return out;
}

std::vector<int> PreparationPlan::skipped() const {
    std::vector<int> out;
    for (const auto& s : stages) {
        if (s.skipped) out.push_back(s.k);
    }
    return out;
}

bool parity_constrained(const OraclePack& pack, int k) {
    if (k < 1 || k > pack.amp_bits()) throw Error(ErrorCode::InvalidArgument, "k outside [1, T]");
    for (const auto& [bits, count] : pack.payload_classes(k)) {
        const bool bad = (bits & 1U) == 0;
        const bool earlier_features = (bits >> 1) != 0;
        if (bad && earlier_features && count > 0) return true;
    }
    return false;
}

PreparationPlan compute_schedule(const OraclePack& pack, const TargetSpec& spec,
                                 const ScheduleOptions& options) {
    PreparationPlan plan;
    plan.n_states = spec.n_states;
    plan.amp_bits = spec.amp_bits;
    plan.phase_bits = spec.phase_bits;
    plan.aux_qubits = spec.aux_qubits;
    plan.eta = spec.eta;
    plan.convention = options.convention;
    plan.rounding = options.rounding;
    plan.skip_cutoff = options.skip_cutoff.value_or(default_skip_cutoff(spec.aux_qubits, spec.amp_bits));

    const std::uint64_t domain = pack.domain_size();
    for (int k = 1; k <= pack.amp_bits(); ++k) {
        StagePlan stage;
        stage.k = k;
        stage.solutions = pack.solutions(k);
        const double fraction =
            static_cast<double>(stage.solutions) / static_cast<double>(pack.payload_size());
        if (stage.solutions == 0 || fraction < plan.skip_cutoff) {
            stage.skipped = true;
            plan.stages.push_back(stage);
            continue;
        }

        const AverageRatios ratios = average_ratios(pack, spec, k, options.convention);
        stage.ratio_ini = ratios.ratio_ini;
        stage.ratio_fin = ratios.ratio_fin;
        const auto sol = biham::solve_iterations(ratios.ratio_ini, ratios.ratio_fin,
                                                 stage.solutions, domain);
        stage.omega = sol.omega;
        stage.t_real = sol.t;
        stage.parity_constrained = parity_constrained(pack, k);

        if (options.rounding == Rounding::StructurePreserving && stage.parity_constrained) {
            stage.t = static_cast<std::uint64_t>(2.0 * std::floor(0.5 * sol.t + 0.5));
        } else {
            stage.t = static_cast<std::uint64_t>(std::floor(0.5 + sol.t));
        }
        if (stage.t == 0) {
            plan.diagnostics.push_back("OutOfBranch: stage " + std::to_string(k) +
                                       " rounds to zero iterations (t = " +
                                       std::to_string(sol.t) + ")");
        }
        plan.stages.push_back(stage);
    }
    return plan;
}

int choose_T(int aux_qubits) {
    if (aux_qubits < 1) throw Error(ErrorCode::InvalidArgument, "choose_T needs a >= 1");
    // 2^-T / (2 T^2) <= 2^-a  <=>  2^(a - T) <= 2 T^2, exact in double for moderate a.
    int t = 1;
    while (std::ldexp(1.0, aux_qubits - t) > 2.0 * t * t) ++t;
    return t;
}

double iteration_bound(std::uint64_t domain, std::uint64_t solutions) {
    return std::numbers::pi *
           std::sqrt(static_cast<double>(domain) / static_cast<double>(solutions));
}

double omega_lower_bound(std::uint64_t domain, std::uint64_t solutions) {
    return 2.0 * std::sqrt(static_cast<double>(solutions) / static_cast<double>(domain));
}

OracleBudget oracle_call_budget(const PreparationPlan& plan, int phase_bits) {
    OracleBudget budget;
    budget.calls = static_cast<std::uint64_t>(phase_bits);
    std::uint64_t min_solutions = 0;
    for (const auto& s : plan.stages) {
        budget.calls += s.t;
        if (!s.skipped && s.solutions > 0) {
            min_solutions = min_solutions == 0 ? s.solutions : std::min(min_solutions, s.solutions);
        }
    }
    budget.bound = static_cast<double>(phase_bits);
    if (min_solutions > 0) {
        const std::uint64_t domain = plan.n_states << plan.aux_qubits;
        budget.bound += plan.amp_bits * iteration_bound(domain, min_solutions);
    }
    return budget;
}

std::string plan_to_json(const PreparationPlan& plan) {
    const auto budget = oracle_call_budget(plan, plan.phase_bits);
    json doc;
    doc["N"] = plan.n_states;
    doc["T"] = plan.amp_bits;
    doc["T'"] = plan.phase_bits;
    doc["a"] = plan.aux_qubits;
    doc["eta"] = plan.eta;
    doc["convention"] = std::string(to_string(plan.convention));
    doc["rounding"] = std::string(to_string(plan.rounding));
    doc["times"] = plan.times();
    doc["omegas"] = plan.omegas();
    doc["skipped"] = plan.skipped();
    doc["budget"] = budget.calls;
    doc["budget_bound"] = budget.bound;
    doc["diagnostics"] = plan.diagnostics;
    return doc.dump(2);
}

}  // namespace qprep
