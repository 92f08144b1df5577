#include <algorithm>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qprep/biham.hpp"
#include "qprep/scheduler.hpp"

using namespace qprep;

namespace {

TargetSpec uniform4(int a, double eta = 0.5) {
    TargetSpec spec;
    spec.n_states = 4;
    spec.probs = fixtures::uniform(4);
    spec.phases.assign(4, 0.0);
    spec.eta = eta;
    spec.aux_qubits = a;
    spec.amp_bits = a >= 1 ? choose_T(a) : 4;
    spec.phase_bits = 3;
    return spec;
}

TargetSpec padded4(int a) {
    auto spec = fixtures::make_spec(fixtures::padded(4), std::max(a, 1));
    spec.aux_qubits = a;
    spec.amp_bits = 4;
    return spec;
}

// Explicit model-state vector over the full register.
StateVector expand(const ModelState& model, const OraclePack& pack) {
    std::vector<Amplitude> amps(pack.domain_size());
    for (std::uint64_t x = 0; x < pack.domain_size(); ++x) {
        amps[x] = model.amplitude(pack.prefix_of(x, model.level).bits);
    }
    return StateVector(std::move(amps));
}

}  // namespace

TEST_SUITE("scheduler") {

TEST_CASE("model state at level 0 is the uniform state") {
    const auto spec = uniform4(4);
    const auto pack = count_classes(spec);
    const auto m0 = model_state(pack, spec, 0);
    CHECK(m0.b_prime == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
    CHECK(m0.class_amp.size() == 1);
    CHECK(m0.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model state at level 1 solves 60 B^2 + 4 (B + 1/(2 sqrt 2))^2 = 1") {
    const auto spec = uniform4(4);
    const auto pack = count_classes(spec);
    const auto m1 = model_state(pack, spec, 1);
    // 64 B^2 + 2 sqrt(2) B - 1/2 = 0
    const double a = 64.0, b = 2.0 * std::numbers::sqrt2, c = -0.5;
    const double r1 = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
    const double r2 = (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
    const double expected = std::abs(r1) < std::abs(r2) ? r1 : r2;
    CHECK(m1.b_prime == doctest::Approx(expected).epsilon(1e-14));
    CHECK(m1.class_count.at(0) == 60);
    CHECK(m1.class_count.at(1) == 4);
    CHECK(m1.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model states are normalized and skip empty classes") {
    const auto spec = fixtures::make_spec(fixtures::gaussian(16), 6);
    const auto pack = count_classes(spec);
    for (int k = 0; k <= spec.amp_bits; ++k) {
        const auto m = model_state(pack, spec, k);
        CHECK(m.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& [bits, count] : m.class_count) CHECK((count > 0 || bits == 0));
        CHECK(expand(m, pack).norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("average ratios from model states") {
    const auto spec = uniform4(4);
    const auto pack = count_classes(spec);
    const auto r = average_ratios(pack, spec, 1);
    CHECK(r.ratio_ini == doctest::Approx(1.0).epsilon(1e-14));
    const double b1 = model_state(pack, spec, 1).b_prime;
    CHECK(r.ratio_fin == doctest::Approx((b1 + 0.5 / std::sqrt(2.0)) / b1).epsilon(1e-12));
}

TEST_CASE("extended ratios equal the split averages of the explicit model vectors") {
    for (const auto& probs : {fixtures::geometric(8), fixtures::gaussian(8), fixtures::padded(8)}) {
        const auto spec = fixtures::make_spec(probs, 6);
        const auto pack = count_classes(spec);
        for (int k = 1; k <= spec.amp_bits; ++k) {
            if (pack.solutions(k) == 0) continue;
            const auto good = [&pack, k](std::uint64_t x) { return pack.amp_bit(k, x) != 0; };
            const auto before = biham::split_averages(expand(model_state(pack, spec, k - 1), pack), good);
            const auto after = biham::split_averages(expand(model_state(pack, spec, k), pack), good);
            const auto r = average_ratios(pack, spec, k);
            CHECK(std::abs(r.ratio_ini - before.g_bar / before.b_bar) <= 1e-12 * std::abs(r.ratio_ini) + 1e-12);
            CHECK(std::abs(r.ratio_fin - after.g_bar / after.b_bar) <= 1e-12 * std::abs(r.ratio_fin) + 1e-12);
        }
    }
}

TEST_CASE("conventions agree without auxiliary qubits") {
    const auto spec = padded4(0);
    const auto pack = count_classes(spec);
    for (int k = 1; k <= 4; ++k) {
        const auto ext = average_ratios(pack, spec, k, CountConvention::Extended);
        const auto lit = average_ratios(pack, spec, k, CountConvention::PaperLiteral);
        CHECK(ext.ratio_ini == doctest::Approx(lit.ratio_ini).epsilon(1e-12));
        CHECK(ext.ratio_fin == doctest::Approx(lit.ratio_fin).epsilon(1e-12));
    }
}

TEST_CASE("conventions differ once the auxiliary region exists") {
    const auto spec = padded4(4);
    const auto pack = count_classes(spec);
    const auto ext1 = average_ratios(pack, spec, 1, CountConvention::Extended);
    const auto lit1 = average_ratios(pack, spec, 1, CountConvention::PaperLiteral);
    CHECK(ext1.ratio_fin == doctest::Approx(lit1.ratio_fin).epsilon(1e-12));
    const auto ext = average_ratios(pack, spec, 2, CountConvention::Extended);
    const auto lit = average_ratios(pack, spec, 2, CountConvention::PaperLiteral);
    CHECK(ext.ratio_fin != doctest::Approx(lit.ratio_fin));
}

TEST_CASE("choose_T") {
    CHECK(choose_T(4) == 2);
    CHECK(choose_T(8) == 4);
    CHECK(choose_T(16) == 9);
    for (int a = 1; a <= 30; ++a) {
        const int t = choose_T(a);
        CHECK(std::ldexp(1.0, -t) / (2.0 * t * t) <= std::ldexp(1.0, -a));
        if (t > 1) CHECK(std::ldexp(1.0, -(t - 1)) / (2.0 * (t - 1) * (t - 1)) > std::ldexp(1.0, -a));
    }
}

TEST_CASE("uniform schedules") {
    CHECK(compute_schedule(count_classes(uniform4(8)), uniform4(8)).times() ==
          std::vector<std::uint64_t>{6, 0, 2, 2});
    CHECK(compute_schedule(count_classes(uniform4(10)), uniform4(10)).times() ==
          std::vector<std::uint64_t>{13, 0, 5, 4, 0});
    const auto plan12 = compute_schedule(count_classes(uniform4(12)), uniform4(12));
    CHECK(plan12.times() == std::vector<std::uint64_t>{25, 0, 10, 8, 0, 4});
    CHECK(plan12.skipped() == std::vector<int>{2, 5});
}

TEST_CASE("a zero solution count skips the stage") {
    const auto spec = uniform4(8);
    const auto plan = compute_schedule(count_classes(spec), spec);
    CHECK(plan.stages[1].solutions == 0);
    CHECK(plan.stages[1].skipped);
    CHECK(plan.stages[1].t == 0);
}

TEST_CASE("small solution counts fall under the skip cutoff") {
    const auto spec = fixtures::make_spec(fixtures::geometric(16), 8);
    const auto pack = count_classes(spec);
    ScheduleOptions options;
    options.skip_cutoff = 0.2;
    const auto plan = compute_schedule(pack, spec, options);
    for (const auto& stage : plan.stages) {
        const bool below = static_cast<double>(stage.solutions) / 16.0 < 0.2;
        CHECK(stage.skipped == below);
    }
    CHECK(default_skip_cutoff(8, 4) == doctest::Approx(1.0 / 64.0));
}

TEST_CASE("iteration counts respect the paper bounds") {
    for (int a : {4, 8, 10, 12}) {
        for (const auto& probs : {fixtures::uniform(8), fixtures::geometric(8), fixtures::gaussian(8),
                                  fixtures::padded(8)}) {
            const auto spec = fixtures::make_spec(probs, a);
            const auto plan = compute_schedule(count_classes(spec), spec);
            for (const auto& stage : plan.stages) {
                if (stage.skipped) continue;
                CHECK(static_cast<double>(stage.t) <= iteration_bound(spec.domain_size(), stage.solutions));
                CHECK(stage.omega >= omega_lower_bound(spec.domain_size(), stage.solutions));
            }
            const auto budget = oracle_call_budget(plan, spec.phase_bits);
            CHECK(static_cast<double>(budget.calls) <= budget.bound);
        }
    }
}

TEST_CASE("structure-preserving rounding is even exactly on parity-constrained stages") {
    for (const auto& probs : {fixtures::geometric(16), fixtures::gaussian(16), fixtures::padded(16)}) {
        const auto spec = fixtures::make_spec(probs, 10);
        const auto pack = count_classes(spec);
        const auto plan = compute_schedule(pack, spec);
        for (const auto& stage : plan.stages) {
            if (stage.skipped) continue;
            CHECK(stage.parity_constrained == parity_constrained(pack, stage.k));
            if (stage.parity_constrained) {
                CHECK(stage.t % 2 == 0);
                CHECK(std::abs(static_cast<double>(stage.t) - stage.t_real) <= 1.0);
            } else {
                CHECK(std::abs(static_cast<double>(stage.t) - stage.t_real) <= 0.5);
            }
        }
    }
}

TEST_CASE("parity constraint") {
    const auto uniform = count_classes(uniform4(8));
    for (int k = 1; k <= 4; ++k) {
        const bool expected = k > 1 && oracle::sqrt_digit(0.5, k) == 0;
        CHECK(parity_constrained(uniform, k) == expected);
    }
    const auto padded = count_classes(padded4(8));
    CHECK_FALSE(parity_constrained(padded, 1));
    CHECK(parity_constrained(padded, 2));
}

TEST_CASE("nearest rounding is the literal floor(1/2 + t)") {
    const auto spec = fixtures::make_spec(fixtures::geometric(8), 10);
    ScheduleOptions options;
    options.rounding = Rounding::Nearest;
    const auto plan = compute_schedule(count_classes(spec), spec, options);
    for (const auto& stage : plan.stages) {
        if (stage.skipped) continue;
        CHECK(stage.t == static_cast<std::uint64_t>(std::floor(0.5 + stage.t_real)));
    }
}

TEST_CASE("schedules depend only on class counts") {
    const auto probs = fixtures::gaussian(16);
    const auto spec = fixtures::make_spec(probs, 10);
    const auto reference = compute_schedule(count_classes(spec), spec).times();
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        auto shuffled = probs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto permuted = spec;
        permuted.probs = shuffled;
        CHECK(compute_schedule(count_classes(permuted), permuted).times() == reference);
    }
}

TEST_CASE("oracle_call_budget") {
    PreparationPlan empty;
    empty.n_states = 4;
    empty.aux_qubits = 2;
    empty.amp_bits = 2;
    empty.stages = {StagePlan{1, 0, 0}, StagePlan{2, 0, 0}};
    empty.stages[0].skipped = empty.stages[1].skipped = true;
    CHECK(oracle_call_budget(empty, 3).calls == 3);

    PreparationPlan two = empty;
    two.stages = {StagePlan{1, 4, 2}, StagePlan{2, 2, 5}};
    CHECK(oracle_call_budget(two, 2).calls == 9);
    CHECK(oracle_call_budget(two, 2).bound ==
          doctest::Approx(2.0 + 2.0 * std::numbers::pi * std::sqrt(16.0 / 2.0)));
}

TEST_CASE("plan JSON") {
    const auto spec = uniform4(8);
    const auto plan = compute_schedule(count_classes(spec), spec);
    const auto text = plan_to_json(plan);
    CHECK(text == plan_to_json(plan));
    const auto doc = nlohmann::json::parse(text);
    CHECK(doc["T"] == 4);
    CHECK(doc["convention"] == "extended");
    CHECK(doc["times"] == nlohmann::json::array({6, 0, 2, 2}));
    CHECK(doc["skipped"] == nlohmann::json::array({2}));
    CHECK(doc["budget"] == 13);
    for (const char* key : {"T'", "a", "eta", "omegas", "budget_bound"}) CHECK(doc.contains(key));
}

}
