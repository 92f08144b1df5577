#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qprep/pipeline.hpp"

namespace qprep::cli {

struct Uniform {
    friend bool operator==(const Uniform&, const Uniform&) = default;
};
struct TruncatedGeometric {
    double ratio = 0.5;
    friend bool operator==(const TruncatedGeometric&, const TruncatedGeometric&) = default;
};
// Defaults: mean (N - 1) / 2, sigma N / 4.
struct DiscretizedGaussian {
    std::optional<double> mean;
    std::optional<double> sigma;
    friend bool operator==(const DiscretizedGaussian&, const DiscretizedGaussian&) = default;
};
struct TableFile {
    std::string path;  // relative paths resolve against the config file
    friend bool operator==(const TableFile&, const TableFile&) = default;
};

using Distribution = std::variant<Uniform, TruncatedGeometric, DiscretizedGaussian, TableFile>;

struct ZeroPhase {
    friend bool operator==(const ZeroPhase&, const ZeroPhase&) = default;
};
struct LinearPhase {
    double slope = 0.0;  // phi(x) = frac(slope x)
    friend bool operator==(const LinearPhase&, const LinearPhase&) = default;
};
struct QuadraticPhase {
    double chirp = 0.0;  // phi(x) = frac(chirp x^2)
    friend bool operator==(const QuadraticPhase&, const QuadraticPhase&) = default;
};
struct RandomPhase {
    std::optional<std::uint64_t> seed;  // defaults to the config seed
    friend bool operator==(const RandomPhase&, const RandomPhase&) = default;
};

using PhaseProfile = std::variant<ZeroPhase, LinearPhase, QuadraticPhase, RandomPhase, TableFile>;

struct InstanceConfig {
    Distribution distribution;
    PhaseProfile phase_profile;
    std::uint64_t n_states = 0;
    int aux_qubits = 0;
    std::optional<int> amp_bits;    // default choose_T(a)
    int phase_bits = 1;
    std::optional<double> eta;      // default default_eta(p)
    CountConvention convention = CountConvention::Extended;
    Rounding rounding = Rounding::StructurePreserving;
    MeasurementMode mode = MeasurementMode::Project;
    std::uint64_t seed = 0;
    int max_retries = 16;

    friend bool operator==(const InstanceConfig&, const InstanceConfig&) = default;
};

// Throws Error(InvalidArgument) on malformed documents.
InstanceConfig parse_config(const std::string& text);
InstanceConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const InstanceConfig& config);

std::vector<double> distribution_probs(const Distribution& dist, std::uint64_t n,
                                       const std::filesystem::path& base_dir);
std::vector<double> phase_values(const PhaseProfile& profile, std::uint64_t n,
                                 std::uint64_t config_seed, const std::filesystem::path& base_dir);

// Enumeration cap: QPREP_MAX_AMPS when set, else the library default.
std::uint64_t max_amplitudes_from_env();

// Builds and validates the run configuration.
RunConfig to_run_config(const InstanceConfig& config, const std::filesystem::path& base_dir);

}  // namespace qprep::cli
