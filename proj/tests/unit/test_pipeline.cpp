#include "doctest.h"
#include "fixtures.hpp"
#include "qprep/pipeline.hpp"

using namespace qprep;

TEST_SUITE("pipeline") {

TEST_CASE("single-solution instance beats the overall bound") {
    const auto spec = fixtures::make_spec({1.0, 0.0}, 16, 3);
    const auto report = run_report(fixtures::make_config(spec));
    CHECK(report.bounds.bound_total > 0.0);
    CHECK(fidelity(report.artifacts.psi_tilde, StateVector::basis(1, 0)) > report.bounds.bound_total);
}

TEST_CASE("uniform target stays flat on the payload") {
    const auto spec = fixtures::make_spec(fixtures::uniform(4), 10);
    const auto artifacts = prepare(fixtures::make_config(spec));
    for (std::uint64_t x = 1; x < 4; ++x) {
        CHECK(std::abs(artifacts.psi_T[x] - artifacts.psi_T[0]) <= 1e-9);
    }
}

TEST_CASE("snapshots are real and constant on classes, and classes only split") {
    for (const auto& probs : {fixtures::geometric(16), fixtures::gaussian(16), fixtures::padded(16)}) {
        auto config = fixtures::make_config(fixtures::make_spec(probs, 10));
        config.record_intermediate = true;
        const auto artifacts = prepare(config);
        const auto pack = count_classes(config.spec);
        REQUIRE(artifacts.snapshots.size() == static_cast<std::size_t>(config.spec.amp_bits));
        std::vector<std::uint64_t> previous(config.spec.n_states, 0);
        for (int k = 1; k <= config.spec.amp_bits; ++k) {
            const auto& snap = artifacts.snapshots[static_cast<std::size_t>(k - 1)];
            CHECK(snap.max_imag() <= 1e-12);
            CHECK(class_spread(snap, pack, k) <= 1e-9);
            // Equal amplitudes at stage k imply equal amplitudes at stage k - 1.
            for (std::uint64_t x = 0; x < config.spec.n_states; ++x) {
                for (std::uint64_t y = x + 1; y < config.spec.n_states; ++y) {
                    if (std::abs(snap[x] - snap[y]) <= 1e-12) {
                        CHECK(previous[x] == previous[y]);
                    }
                }
            }
            for (std::uint64_t x = 0; x < config.spec.n_states; ++x) {
                previous[x] = pack.prefix_of(x, k).bits;
            }
        }
        CHECK(artifacts.psi_T.max_imag() <= 1e-12);
    }
}

TEST_CASE("phase stage turns the post-selected state into the final state") {
    auto spec = fixtures::make_spec(fixtures::gaussian(8), 10, 4);
    for (std::uint64_t x = 0; x < 8; ++x) spec.phases[x] = 0.1 * static_cast<double>(x);
    const auto artifacts = prepare(fixtures::make_config(spec));
    auto expected = artifacts.psi_tilde_r;
    apply_phase_stage(expected, spec);
    CHECK(expected == artifacts.psi_tilde);
}

TEST_CASE("project-mode reports are byte-identical") {
    const auto config = fixtures::make_config(fixtures::make_spec(fixtures::geometric(8), 10));
    CHECK(run_report_to_json(run_report(config)) == run_report_to_json(run_report(config)));
}

TEST_CASE("sample mode is reproducible from the seed") {
    auto config = fixtures::make_config(fixtures::make_spec(fixtures::gaussian(8), 8));
    config.mode = MeasurementMode::Sample;
    config.max_retries = 64;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        config.seed = seed;
        CHECK(run_report_to_json(run_report(config)) == run_report_to_json(run_report(config)));
    }
}

TEST_CASE("sample mode gives up after max_retries") {
    // a = 1 on a peaked target leaves a large failure probability
    auto spec = fixtures::make_spec(fixtures::geometric(4), 1);
    auto config = fixtures::make_config(spec);
    config.mode = MeasurementMode::Sample;
    config.max_retries = 1;
    int exhausted = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        config.seed = seed;
        try {
            const auto artifacts = prepare(config);
            CHECK(artifacts.retries_used == 0);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RetriesExhausted);
            ++exhausted;
        }
    }
    CHECK(exhausted > 0);

    config.max_retries = 0;
    CHECK_THROWS_AS(prepare(config), Error);
}

TEST_CASE("the pipeline needs auxiliary qubits and respects the cap") {
    auto spec = fixtures::make_spec(fixtures::uniform(4), 4);
    spec.aux_qubits = 0;
    CHECK_THROWS_AS(prepare(fixtures::make_config(spec)), Error);

    auto config = fixtures::make_config(fixtures::make_spec(fixtures::uniform(4), 10));
    config.max_amplitudes = 1024;
    CHECK_THROWS_AS(prepare(config), Error);
}

TEST_CASE("report verdict agrees with the checks") {
    const auto report = run_report(fixtures::make_config(fixtures::make_spec(fixtures::uniform(4), 12, 4)));
    CHECK_FALSE(report.any_violated());
    const auto json = run_report_to_json(report);
    CHECK(json.find("\"verdict\": \"PASS\"") != std::string::npos);
}

}
