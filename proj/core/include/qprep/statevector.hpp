#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qprep/error.hpp"

namespace qprep {

struct TargetSpec;

using Amplitude = std::complex<double>;

// Exact amplitudes of an L-qubit register, indexed by computational basis label.
class StateVector {
public:
    StateVector() = default;
    // Takes ownership of 2^L amplitudes; the size must be a power of two.
    explicit StateVector(std::vector<Amplitude> amps);

    static StateVector uniform(int num_qubits);
    static StateVector basis(int num_qubits, std::uint64_t index);

    int num_qubits() const { return num_qubits_; }
    std::uint64_t size() const { return amps_.size(); }

    std::span<Amplitude> amplitudes() { return amps_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    Amplitude& operator[](std::uint64_t x) { return amps_[x]; }
    const Amplitude& operator[](std::uint64_t x) const { return amps_[x]; }

    double norm_squared() const;
    double max_imag() const;

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<Amplitude> amps_;
    int num_qubits_ = 0;
};

// Deterministic pairwise sums; the result does not depend on how work is split.
Amplitude pairwise_sum(std::span<const Amplitude> values);
double pairwise_sum(std::span<const double> values);

// amps(x) <- (-1)^marked(x) amps(x)
template <class Predicate>
void apply_sign_oracle(StateVector& state, Predicate&& marked) {
    auto amps = state.amplitudes();
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        if (marked(x)) amps[x] = -amps[x];
    }
}

// Reflection about the uniform state: amps(x) <- 2 mean - amps(x).
void apply_diffusion(StateVector& state);

// t repetitions of diffusion after sign oracle.
template <class Predicate>
void grover(StateVector& state, Predicate&& marked, std::uint64_t iterations) {
    for (std::uint64_t i = 0; i < iterations; ++i) {
        apply_sign_oracle(state, marked);
        apply_diffusion(state);
    }
}

// Multiplies amps(x) by U_1...U_{T'} phase factors built from the phase bits of spec.
// The state must live on the log2 N payload qubits.
void apply_phase_stage(StateVector& state, const TargetSpec& spec);

enum class MeasurementMode { Project, Sample };

struct MeasurementOutcome {
    bool success = false;
    double p_fail = 0.0;
    // Renormalized payload restriction; present whenever success is true.
    std::optional<StateVector> post_state;
};

// Measures the `aux_qubits` most significant qubits. Project mode always
// conditions on the all-zero outcome; Sample mode draws it with probability 1 - p_fail.
MeasurementOutcome measure_aux(const StateVector& state, int aux_qubits, MeasurementMode mode,
                               std::mt19937_64* rng = nullptr);

Amplitude inner_product(const StateVector& bra, const StateVector& ket);

// |<s1|s2>|
double fidelity(const StateVector& s1, const StateVector& s2);

// `x,re,im` rows with 17 significant digits.
void write_amplitudes_csv(std::ostream& out, const StateVector& state);
void write_amplitudes_csv(const std::filesystem::path& path, const StateVector& state);
StateVector read_amplitudes_csv(std::istream& in);

}  // namespace qprep
