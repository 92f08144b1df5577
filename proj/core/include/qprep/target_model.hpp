#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qprep/error.hpp"

namespace qprep {

// Default enumeration cap on 2^a N; QPREP_MAX_AMPS overrides it in the CLI.
inline constexpr std::uint64_t kDefaultMaxAmplitudes = std::uint64_t{1} << 24;

// Deepest bit of sqrt(eta N p) that double precision resolves exactly.
inline constexpr int kMaxDoubleBitDepth = 52;

// Which domain N^k_{q_{1:k}} is counted over: the full register [0, 2^a N)
// or the payload range [0, N) only.
enum class CountConvention { Extended, PaperLiteral };

std::string_view to_string(CountConvention convention) noexcept;

// Classical problem instance: target probabilities and phases plus the
// algorithm parameters (T amplitude bits, T' phase bits, a auxiliary qubits).
struct TargetSpec {
    std::uint64_t n_states = 0;
    std::vector<double> probs;
    std::vector<double> phases;
    double eta = 0.0;
    int amp_bits = 1;
    int phase_bits = 1;
    int aux_qubits = 1;
    // Optional pre-tabulated amplitude bits: word x holds c_1(x)..c_64(x) of
    // sqrt(eta N p(x)), c_1 in the most significant position. Empty means the
    // bits are extracted from probs in double precision.
    std::vector<std::uint64_t> amp_bit_words;

    std::uint64_t domain_size() const;  // 2^a N
    int payload_qubits() const;         // log2 N
    int num_qubits() const;             // log2 N + a
    // sqrt(eta N p(x)), the binary fraction whose digits define the oracles.
    double scaled_amplitude(std::uint64_t x) const;
};

struct Validation {
    bool ok = true;
    ErrorCode code = ErrorCode::InvalidArgument;
    std::string message;
    std::optional<std::uint64_t> offending_x;

    explicit operator bool() const noexcept { return ok; }
};

// Checks every TargetSpec invariant and reports the first one violated.
Validation validate_spec(const TargetSpec& spec);

// Throws qprep::Error carrying the first violated invariant.
void require_valid(const TargetSpec& spec);

// eta = 1 / (2 N max p), which keeps sqrt(eta N p(x)) <= 1/sqrt(2).
double default_eta(std::span<const double> probs);

// c_k(x) = floor(2^k sqrt(eta N p(x))) mod 2 for x < N, and 0 on the auxiliary region.
int amp_bit(const TargetSpec& spec, int k, std::uint64_t x);

// c'_k(x) = floor(2^k phi(x)) mod 2.
int phase_bit(const TargetSpec& spec, int k, std::uint64_t x);

// T'-bit truncation of phi(x): sum_{k<=T'} c'_k(x) 2^-k.
double truncated_phase(const TargetSpec& spec, std::uint64_t x);

// A bit prefix q_1..q_level; q_1 is the most significant of the `level` bits.
struct Prefix {
    int level = 0;
    std::uint64_t bits = 0;

    int bit(int j) const { return static_cast<int>((bits >> (level - j)) & 1U); }
    Prefix extended(int q) const { return {level + 1, (bits << 1) | static_cast<std::uint64_t>(q & 1)}; }
    friend bool operator==(const Prefix&, const Prefix&) = default;
};

std::string to_string(const Prefix& prefix);

// Oracle bit functions and exact class counts for one TargetSpec.
class OraclePack {
public:
    OraclePack() = default;

    int amp_bits() const { return amp_bits_; }
    std::uint64_t payload_size() const { return payload_size_; }
    std::uint64_t domain_size() const { return domain_size_; }

    int amp_bit(int k, std::uint64_t x) const;
    // c_{1:level}(x) packed as a Prefix; the auxiliary region maps to the zero prefix.
    Prefix prefix_of(std::uint64_t x, int level) const;

    // N_k: number of x < N with c_k(x) = 1.
    std::uint64_t solutions(int k) const;
    std::uint64_t class_count(const Prefix& prefix,
                              CountConvention convention = CountConvention::Extended) const;
    // Nonempty level-k classes over the payload range, keyed by prefix bits.
    const std::map<std::uint64_t, std::uint64_t>& payload_classes(int level) const;

    std::span<const std::uint64_t> codes() const { return codes_; }

private:
    friend OraclePack count_classes(const TargetSpec&, std::uint64_t);

    int amp_bits_ = 0;
    std::uint64_t payload_size_ = 0;
    std::uint64_t domain_size_ = 0;
    std::vector<std::uint64_t> codes_;  // c_{1:T}(x) per x < N, c_1 most significant
    std::vector<std::uint64_t> solutions_;
    std::vector<std::map<std::uint64_t, std::uint64_t>> classes_;
};

// Product formula prod_k |c_k(x) - 1 + q_k|.
int refined_oracle(const OraclePack& pack, const Prefix& prefix, std::uint64_t x);

// Exact counts by enumeration of x < N; the all-zero class additionally absorbs
// the (2^a - 1) N auxiliary points under the extended convention.
OraclePack count_classes(const TargetSpec& spec,
                         std::uint64_t max_amplitudes = kDefaultMaxAmplitudes);

struct TargetTables {
    std::vector<double> probs;
    std::vector<double> phases;
};

// CSV with header `x,p,phi`; rows that are absent read as p = 0, phi = 0.
TargetTables read_table_csv(const std::filesystem::path& path, std::uint64_t n_states);

}  // namespace qprep
