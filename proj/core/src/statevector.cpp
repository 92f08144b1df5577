#include "qprep/statevector.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "qprep/target_model.hpp"

namespace qprep {
namespace {

constexpr std::size_t kPairwiseBlock = 64;
constexpr double kMinSuccessProbability = 1e-15;

template <class T>
T pairwise(std::span<const T> values) {
    if (values.size() <= kPairwiseBlock) {
        T acc{};
        for (const auto& v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise(values.first(half)) + pairwise(values.subspan(half));
}

// Exact e^{2 pi i / 2^k} for the first two levels, where cos/sin would leave residue.
Amplitude phase_unit(int k) {
    if (k == 1) return {-1.0, 0.0};
    if (k == 2) return {0.0, 1.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * std::ldexp(1.0, -k));
}

}  // namespace

StateVector::StateVector(std::vector<Amplitude> amps) : amps_(std::move(amps)) {
    if (amps_.empty() || !std::has_single_bit(amps_.size())) {
        throw Error(ErrorCode::InvalidArgument, "amplitude count must be a power of two");
    }
    num_qubits_ = std::countr_zero(amps_.size());
}

StateVector StateVector::uniform(int num_qubits) {
    if (num_qubits < 0 || num_qubits > 40) {
        throw Error(ErrorCode::InvalidArgument, "num_qubits outside [0, 40]");
    }
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return StateVector(std::vector<Amplitude>(dim, Amplitude{amp, 0.0}));
}

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
    if (num_qubits < 0 || num_qubits > 40) {
        throw Error(ErrorCode::InvalidArgument, "num_qubits outside [0, 40]");
    }
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    if (index >= dim) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
    std::vector<Amplitude> amps(dim);
    amps[index] = 1.0;
    return StateVector(std::move(amps));
}

double StateVector::norm_squared() const {
    std::vector<double> probs(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) probs[i] = std::norm(amps_[i]);
    return pairwise_sum(probs);
}

double StateVector::max_imag() const {
    double m = 0.0;
    for (const auto& a : amps_) m = std::max(m, std::abs(a.imag()));
    return m;
}

Amplitude pairwise_sum(std::span<const Amplitude> values) { return pairwise(values); }

double pairwise_sum(std::span<const double> values) { return pairwise(values); }

void apply_diffusion(StateVector& state) {
    auto amps = state.amplitudes();
    const Amplitude twice_mean =
        2.0 * pairwise_sum(std::span<const Amplitude>(amps)) / static_cast<double>(amps.size());
    for (auto& a : amps) a = twice_mean - a;
}

void apply_phase_stage(StateVector& state, const TargetSpec& spec) {
    if (state.size() != spec.n_states) {
        throw Error(ErrorCode::DimensionMismatch,
                    "phase stage acts on the log2 N payload qubits");
    }
    std::vector<Amplitude> units;
    for (int k = 1; k <= spec.phase_bits; ++k) units.push_back(phase_unit(k));

    auto amps = state.amplitudes();
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        for (int k = 1; k <= spec.phase_bits; ++k) {
            if (phase_bit(spec, k, x)) amps[x] *= units[static_cast<std::size_t>(k - 1)];
        }
    }
}

MeasurementOutcome measure_aux(const StateVector& state, int aux_qubits, MeasurementMode mode,
                               std::mt19937_64* rng) {
    if (aux_qubits < 0 || aux_qubits > state.num_qubits()) {
        throw Error(ErrorCode::InvalidArgument, "aux_qubits outside [0, L]");
    }
    const std::uint64_t payload = state.size() >> aux_qubits;
    const auto amps = state.amplitudes();

    std::vector<double> probs(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) probs[i] = std::norm(amps[i]);
    const std::span<const double> all(probs);
    const double kept = pairwise_sum(all.first(payload));
    const double p_fail = pairwise_sum(all.subspan(payload));

    if (kept < kMinSuccessProbability) {
        throw Error(ErrorCode::AllMassInAuxRegion, "success probability below 1e-15");
    }

    MeasurementOutcome outcome;
    outcome.p_fail = p_fail;
    if (mode == MeasurementMode::Sample) {
        if (rng == nullptr) {
            throw Error(ErrorCode::InvalidArgument, "sample mode needs a random generator");
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        outcome.success = unit(*rng) >= p_fail;
        if (!outcome.success) return outcome;
    } else {
        outcome.success = true;
    }

    const double scale = 1.0 / std::sqrt(kept);
    std::vector<Amplitude> post(amps.begin(), amps.begin() + static_cast<std::ptrdiff_t>(payload));
    for (auto& a : post) a *= scale;
    outcome.post_state = StateVector(std::move(post));
    return outcome;
}

Amplitude inner_product(const StateVector& bra, const StateVector& ket) {
    if (bra.size() != ket.size()) {
        throw Error(ErrorCode::DimensionMismatch, "states have different dimensions");
    }
    std::vector<Amplitude> terms(bra.size());
    for (std::uint64_t x = 0; x < bra.size(); ++x) terms[x] = std::conj(bra[x]) * ket[x];
    return pairwise_sum(terms);
}

double fidelity(const StateVector& s1, const StateVector& s2) {
    return std::abs(inner_product(s1, s2));
}

void write_amplitudes_csv(std::ostream& out, const StateVector& state) {
    out << "x,re,im\n";
    out << std::setprecision(17);
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        out << x << ',' << state[x].real() << ',' << state[x].imag() << '\n';
    }
}

void write_amplitudes_csv(const std::filesystem::path& path, const StateVector& state) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_amplitudes_csv(out, state);
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

StateVector read_amplitudes_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,re,im", 0) != 0) {
        throw Error(ErrorCode::InvalidArgument, "expected header `x,re,im`");
    }
    std::vector<Amplitude> amps;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string fx, fre, fim;
        std::getline(row, fx, ',');
        std::getline(row, fre, ',');
        std::getline(row, fim);
        const auto x = std::stoull(fx);
        if (x != amps.size()) throw Error(ErrorCode::InvalidArgument, "rows must be in x order");
        amps.emplace_back(std::stod(fre), std::stod(fim));
    }
    return StateVector(std::move(amps));
}

}  // namespace qprep
