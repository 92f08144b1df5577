#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qprep/target_model.hpp"

namespace qprep {

// 1 / sqrt(eta N): the amplitude carried by one unit of the binary expansion.
double feature_unit(const TargetSpec& spec);

// Ideal k-bit state: class amplitudes B'^k + sum_{j<=k} q_j 2^-j / sqrt(eta N),
// normalized over the full register with extended-domain counts.
struct ModelState {
    int level = 0;
    double b_prime = 0.0;
    std::map<std::uint64_t, double> class_amp;         // prefix bits -> A'^k
    std::map<std::uint64_t, std::uint64_t> class_count;  // prefix bits -> N^k (extended)

    double amplitude(std::uint64_t prefix_bits) const;
    double norm_squared() const;
};

// Of the two normalization roots for B'^k the one with smaller magnitude is
// kept; it reproduces the uniform state at k = 0. Throws NoRealRoot.
ModelState model_state(const OraclePack& pack, const TargetSpec& spec, int k);

struct AverageRatios {
    double ratio_ini = 0.0;  // g'_ini / b'_ini from the level k-1 model state
    double ratio_fin = 0.0;  // g'_fin / b'_fin from the level k model state
};

// Requires N_k > 0. A vanishing bad average is reported as a signed infinity.
AverageRatios average_ratios(const OraclePack& pack, const TargetSpec& spec, int k,
                             CountConvention convention = CountConvention::Extended);

enum class Rounding {
    // Nearest integer, except nearest even integer when the bad set of O_k
    // holds x with a nonzero earlier prefix; odd counts would negate those features.
    StructurePreserving,
    // floor(1/2 + t) at every stage.
    Nearest,
};

std::string_view to_string(Rounding rounding) noexcept;

struct ScheduleOptions {
    CountConvention convention = CountConvention::Extended;
    Rounding rounding = Rounding::StructurePreserving;
    // Stages with N_k / N below this are skipped; default 2^{-a/2} / T.
    std::optional<double> skip_cutoff;
};

double default_skip_cutoff(int aux_qubits, int amp_bits);

struct StagePlan {
    int k = 0;
    std::uint64_t solutions = 0;  // N_k
    std::uint64_t t = 0;
    double t_real = 0.0;  // unrounded omega_k t_k / omega_k
    double omega = 0.0;
    double ratio_ini = 0.0;
    double ratio_fin = 0.0;
    bool skipped = false;
    bool parity_constrained = false;
};

struct PreparationPlan {
    std::uint64_t n_states = 0;
    int amp_bits = 0;
    int phase_bits = 0;
    int aux_qubits = 0;
    double eta = 0.0;
    CountConvention convention = CountConvention::Extended;
    Rounding rounding = Rounding::StructurePreserving;
    double skip_cutoff = 0.0;
    std::vector<StagePlan> stages;  // stages[k - 1] is stage k
    std::vector<std::string> diagnostics;

    std::vector<std::uint64_t> times() const;
    std::vector<double> omegas() const;
    std::vector<int> skipped() const;
};

// True when some x < N with c_k(x) = 0 has a nonzero prefix c_{1:k-1}(x).
bool parity_constrained(const OraclePack& pack, int k);

// Iteration counts t_1..t_T from the model-state average ratios.
PreparationPlan compute_schedule(const OraclePack& pack, const TargetSpec& spec,
                                 const ScheduleOptions& options = {});

// Smallest T >= 1 with 2^-T / (2 T^2) <= 2^-a.
int choose_T(int aux_qubits);

struct OracleBudget {
    std::uint64_t calls = 0;  // sum_k t_k + T'
    double bound = 0.0;       // T' + T pi sqrt(2^a N / min_k N_k)
};

OracleBudget oracle_call_budget(const PreparationPlan& plan, int phase_bits);

// pi sqrt(2^a N / N_k)
double iteration_bound(std::uint64_t domain, std::uint64_t solutions);
// 2 sqrt(N_k / 2^a N)
double omega_lower_bound(std::uint64_t domain, std::uint64_t solutions);

// {T, T', a, eta, convention, times[], omegas[], skipped[], budget, budget_bound, ...}
std::string plan_to_json(const PreparationPlan& plan);

}  // namespace qprep
