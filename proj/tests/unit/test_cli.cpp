#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qprep_cli/commands.hpp"
#include "qprep_cli/config.hpp"

using namespace qprep;
using namespace qprep::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("qprep_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip") {
    const std::vector<std::string> docs = {
        R"({"N": 4, "a": 8, "T'": 3})",
        R"({"distribution": {"family": "truncated-geometric", "ratio": 0.5},
            "phase_profile": {"kind": "linear", "slope": 0.125},
            "N": 8, "a": 10, "T": 5, "T'": 2, "eta": 0.1, "convention": "paper-literal",
            "rounding": "nearest", "mode": "sample", "seed": 99, "max_retries": 4})",
        R"({"distribution": {"family": "discretized-gaussian", "sigma": 1.5},
            "phase_profile": {"kind": "random"}, "N": 16, "a": 12, "T'": 5})",
        R"({"distribution": {"family": "table", "path": "p.csv"},
            "phase_profile": {"kind": "quadratic", "chirp": 0.01}, "N": 4, "a": 8, "T'": 1})",
    };
    for (const auto& doc : docs) {
        const auto parsed = parse_config(doc);
        const auto text = serialize_config(parsed);
        CHECK(parse_config(text) == parsed);
        CHECK(serialize_config(parse_config(text)) == text);
    }
}

TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(parse_config("{"), Error);
    CHECK_THROWS_AS(parse_config(R"({"N": 4, "T'": 3})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"N": 4, "a": 8, "T'": 3, "typo": 1})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"N": 4, "a": 8, "T'": 3, "mode": "maybe"})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"N": 4, "a": 8, "T'": 3,
                                    "distribution": {"family": "zipf"}})"),
                    Error);
}

TEST_CASE("builtin families are normalized") {
    for (const Distribution& d : {Distribution{Uniform{}}, Distribution{TruncatedGeometric{0.5}},
                                  Distribution{DiscretizedGaussian{}}}) {
        const auto p = distribution_probs(d, 16, ".");
        double total = 0.0;
        for (double v : p) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto g = distribution_probs(TruncatedGeometric{0.5}, 4, ".");
    CHECK(g[0] == doctest::Approx(8.0 / 15.0));
    const auto n = distribution_probs(DiscretizedGaussian{}, 8, ".");
    CHECK(n[3] == doctest::Approx(n[4]));
}

TEST_CASE("phase profiles") {
    const auto lin = phase_values(LinearPhase{0.375}, 4, 0, ".");
    CHECK(lin == std::vector<double>{0.0, 0.375, 0.75, 0.125});
    const auto quad = phase_values(QuadraticPhase{0.25}, 4, 0, ".");
    CHECK(quad == std::vector<double>{0.0, 0.25, 0.0, 0.25});
    const auto r1 = phase_values(RandomPhase{}, 8, 5, ".");
    CHECK(r1 == phase_values(RandomPhase{5}, 8, 99, "."));
    CHECK(r1 != phase_values(RandomPhase{}, 8, 6, "."));
    for (double v : r1) CHECK((v >= 0.0 && v < 1.0));
}

TEST_CASE("table files resolve relative to the config") {
    TempDir dir;
    dir.write("p.csv", "x,p,phi\n0,0.5,0.5\n1,0.25,0\n2,0.125,0.25\n3,0.125,0\n");
    const auto cfg = dir.write("c.json", R"({"distribution": {"family": "table", "path": "p.csv"},
        "phase_profile": {"kind": "table", "path": "p.csv"}, "N": 4, "a": 8, "T'": 2})");
    const auto run = to_run_config(load_config(cfg), dir.path);
    CHECK(run.spec.probs == std::vector<double>{0.5, 0.25, 0.125, 0.125});
    CHECK(run.spec.phases == std::vector<double>{0.5, 0.0, 0.25, 0.0});
    CHECK(run.spec.eta == doctest::Approx(0.25));
    CHECK(run.spec.amp_bits == 4);
}

TEST_CASE("QPREP_MAX_AMPS overrides the enumeration cap") {
    ::setenv("QPREP_MAX_AMPS", "512", 1);
    CHECK(max_amplitudes_from_env() == 512);
    ::setenv("QPREP_MAX_AMPS", "lots", 1);
    CHECK_THROWS_AS(max_amplitudes_from_env(), Error);
    ::unsetenv("QPREP_MAX_AMPS");
    CHECK(max_amplitudes_from_env() == kDefaultMaxAmplitudes);
}

TEST_CASE("plan command") {
    TempDir dir;
    const auto cfg = dir.write("u.json", R"({"distribution": {"family": "uniform"}, "N": 4, "a": 8, "T'": 3})");
    std::ostringstream out1, out2, err;
    CHECK(cmd_plan(cfg, out1, err) == kExitOk);
    CHECK(cmd_plan(cfg, out2, err) == kExitOk);
    CHECK(out1.str() == out2.str());
    const auto doc = nlohmann::json::parse(out1.str());
    CHECK(doc["T"] == 4);
    CHECK(doc["times"][1] == 0);
    CHECK(doc["skipped"] == nlohmann::json::array({2}));

    const auto bad = dir.write("n3.json", R"({"N": 3, "a": 8, "T'": 3})");
    std::ostringstream out3, err3;
    CHECK(cmd_plan(bad, out3, err3) == kExitValidation);
    CHECK(err3.str().find("NotPowerOfTwo") != std::string::npos);

    std::ostringstream out4, err4;
    CHECK(cmd_plan(dir.path / "missing.json", out4, err4) == kExitIo);
}

TEST_CASE("run and verify commands") {
    TempDir dir;
    SUBCASE("uniform instance passes") {
        const auto cfg = dir.write("u.json", R"({"N": 4, "a": 12, "T'": 4})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, dir.path / "out", out, err) == kExitOk);
        CHECK(out.str().rfind("PASS", 0) == 0);
        CHECK(fs::exists(dir.path / "out" / "report.json"));
        CHECK(fs::exists(dir.path / "out" / "amplitudes.csv"));
        std::ostringstream vout, verr;
        CHECK(cmd_verify(dir.path / "out" / "report.json", vout, verr) == kExitOk);
    }
    SUBCASE("dyadic table instance passes with every feature inside the bound") {
        dir.write("p.csv", "x,p,phi\n0,0.5,0\n1,0.25,0\n2,0.125,0\n3,0.125,0\n");
        const auto cfg = dir.write("t.json", R"({"distribution": {"family": "table", "path": "p.csv"},
            "N": 4, "a": 12, "T'": 3})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, dir.path / "out", out, err) == kExitOk);
        std::ifstream in(dir.path / "out" / "report.json");
        const auto doc = nlohmann::json::parse(in);
        const double bound = doc["bounds"]["feature_error"];
        for (const auto& stage : doc["plan"]["skipped"]) CHECK(stage.is_number());
        int checked = 0;
        for (std::size_t k = 0; k < doc["features"]["h_err"].size(); ++k) {
            const auto& e = doc["features"]["h_err"][k];
            if (e.is_null()) continue;
            CHECK(e.get<double>() < bound);
            ++checked;
        }
        CHECK(checked >= 4);
    }
    SUBCASE("an unwritable output directory is an I/O error") {
        const auto cfg = dir.write("u.json", R"({"N": 4, "a": 8, "T'": 3})");
        dir.write("blocker", "not a directory");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, dir.path / "blocker" / "out", out, err) == kExitIo);
    }
    SUBCASE("a tampered report fails verification") {
        const auto cfg = dir.write("u.json", R"({"N": 4, "a": 12, "T'": 4})");
        std::ostringstream out, err;
        REQUIRE(cmd_run(cfg, dir.path / "out", out, err) == kExitOk);
        std::ifstream in(dir.path / "out" / "report.json");
        auto doc = nlohmann::json::parse(in);
        for (auto& c : doc["checks"]) {
            if (c["name"] == "p_fail_identity") c["measured"] = 1.0;
        }
        const auto tampered = dir.write("tampered.json", doc.dump());
        std::ostringstream vout, verr;
        CHECK(cmd_verify(tampered, vout, verr) == kExitInternal);
    }
}

TEST_CASE("random phases make the run fail on the phase chain") {
    TempDir dir;
    const auto cfg = dir.write("r.json", R"({"distribution": {"family": "uniform"},
        "phase_profile": {"kind": "random"}, "N": 8, "a": 10, "T'": 1, "seed": 3})");
    std::ostringstream out, err;
    CHECK(cmd_run(cfg, dir.path / "out", out, err) == kExitBoundViolated);
    CHECK(out.str().find("phase_chain") != std::string::npos);
    std::ostringstream vout, verr;
    CHECK(cmd_verify(dir.path / "out" / "report.json", vout, verr) == kExitBoundViolated);
}

TEST_CASE("sweep command") {
    TempDir dir;
    SUBCASE("tprime") {
        const auto cfg = dir.write("u.json", R"({"N": 4, "a": 12, "T'": 1})");
        std::ostringstream out, err;
        CHECK(cmd_sweep(cfg, "tprime=1..6", dir.path / "s.csv", out, err) == kExitOk);
        const auto rows = read_csv(dir.path / "s.csv");
        REQUIRE(rows.size() == 7);
        CHECK(rows[0][0] == "tprime");
        for (std::size_t i = 2; i < rows.size(); ++i) {
            CHECK(std::stod(rows[i][2]) >= std::stod(rows[i - 1][2]));
        }
    }
    SUBCASE("a with fixed T") {
        const auto cfg = dir.write("u.json", R"({"N": 4, "a": 8, "T": 4, "T'": 3})");
        std::ostringstream out, err;
        CHECK(cmd_sweep(cfg, "a=8..14", dir.path / "s.csv", out, err) == kExitOk);
        const auto rows = read_csv(dir.path / "s.csv");
        REQUIRE(rows.size() == 8);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::stoi(rows[i][0]) == 7 + static_cast<int>(i));
            const double fid = std::stod(rows[i][1]);
            const double bound = std::stod(rows[i][2]);
            if (bound > 0.0) CHECK(fid >= bound);
            if (i > 1) CHECK(bound >= std::stod(rows[i - 1][2]));
        }
    }
    SUBCASE("bad range") {
        const auto cfg = dir.write("u.json", R"({"N": 4, "a": 8, "T'": 3})");
        std::ostringstream out, err;
        CHECK(cmd_sweep(cfg, "eta=1..2", dir.path / "s.csv", out, err) == kExitValidation);
    }
}

}
