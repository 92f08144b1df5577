#include "qprep/target_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qprep {
namespace {

constexpr double kNormTolerance = 1e-9;
constexpr int kMaxWordBits = 64;

bool is_power_of_two(std::uint64_t n) { return n != 0 && std::has_single_bit(n); }

Validation fail(ErrorCode code, std::string message,
                std::optional<std::uint64_t> x = std::nullopt) {
    return Validation{false, code, std::move(message), x};
}

int max_amp_depth(const TargetSpec& spec) {
    return spec.amp_bit_words.empty() ? kMaxDoubleBitDepth : kMaxWordBits;
}

int binary_digit(double value, int k) {
    // floor(2^k v) is exact in double for v in [0, 1); fmod of an integer is exact too.
    return static_cast<int>(std::fmod(std::floor(std::ldexp(value, k)), 2.0));
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

std::string_view to_string(CountConvention convention) noexcept {
    return convention == CountConvention::Extended ? "extended" : "paper-literal";
}

std::uint64_t TargetSpec::domain_size() const { return n_states << aux_qubits; }

int TargetSpec::payload_qubits() const { return std::countr_zero(n_states); }

int TargetSpec::num_qubits() const { return payload_qubits() + aux_qubits; }

double TargetSpec::scaled_amplitude(std::uint64_t x) const {
    if (x >= n_states) return 0.0;
    return std::sqrt(eta * static_cast<double>(n_states) * probs[x]);
}

Validation validate_spec(const TargetSpec& spec) {
    if (!is_power_of_two(spec.n_states)) {
        return fail(ErrorCode::NotPowerOfTwo,
                    "N = " + std::to_string(spec.n_states) + " is not a power of two");
    }
    if (spec.probs.size() != spec.n_states || spec.phases.size() != spec.n_states) {
        return fail(ErrorCode::InvalidArgument, "probability and phase tables must have N entries");
    }
    if (spec.amp_bits < 1 || spec.amp_bits > max_amp_depth(spec)) {
        return fail(ErrorCode::InvalidArgument,
                    "amp_bits T = " + std::to_string(spec.amp_bits) + " outside [1, " +
                        std::to_string(max_amp_depth(spec)) + "]");
    }
    if (spec.phase_bits < 1 || spec.phase_bits > kMaxDoubleBitDepth) {
        return fail(ErrorCode::InvalidArgument,
                    "phase_bits T' = " + std::to_string(spec.phase_bits) + " outside [1, 52]");
    }
    if (spec.aux_qubits < 0 || spec.payload_qubits() + spec.aux_qubits > 62) {
        return fail(ErrorCode::InvalidArgument, "aux_qubits a must be >= 0 and log2 N + a <= 62");
    }
    if (!spec.amp_bit_words.empty() && spec.amp_bit_words.size() != spec.n_states) {
        return fail(ErrorCode::InvalidArgument, "amp_bit_words must have N entries");
    }

    double total = 0.0;
    for (std::uint64_t x = 0; x < spec.n_states; ++x) {
        const double p = spec.probs[x];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            return fail(ErrorCode::InvalidArgument,
                        "p(" + std::to_string(x) + ") outside [0, 1]", x);
        }
        const double phi = spec.phases[x];
        if (!std::isfinite(phi) || phi < 0.0 || phi >= 1.0) {
            return fail(ErrorCode::InvalidArgument,
                        "phi(" + std::to_string(x) + ") outside [0, 1)", x);
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "sum of p(x) = " << total;
        return fail(ErrorCode::ProbabilityNotNormalized, os.str());
    }

    if (!(spec.eta > 0.0 && spec.eta < 1.0)) {
        std::ostringstream os;
        os << "eta = " << spec.eta << " outside (0, 1)";
        return fail(ErrorCode::EtaOutOfRange, os.str());
    }
    const double n = static_cast<double>(spec.n_states);
    for (std::uint64_t x = 0; x < spec.n_states; ++x) {
        const double p = spec.probs[x];
        if (p > 1.0 / (spec.eta * n) || spec.scaled_amplitude(x) >= 1.0) {
            std::ostringstream os;
            os.precision(17);
            os << "p(" << x << ") = " << p << " exceeds 1/(eta N) = " << 1.0 / (spec.eta * n);
            return fail(ErrorCode::EtaConstraintViolated, os.str(), x);
        }
    }
    return {};
}

void require_valid(const TargetSpec& spec) {
    if (auto v = validate_spec(spec); !v) throw Error(v.code, v.message);
}

double default_eta(std::span<const double> probs) {
    if (probs.empty()) throw Error(ErrorCode::InvalidArgument, "empty probability table");
    const double max_p = *std::max_element(probs.begin(), probs.end());
    if (!(max_p > 0.0)) throw Error(ErrorCode::InvalidArgument, "all probabilities are zero");
    return 1.0 / (2.0 * static_cast<double>(probs.size()) * max_p);
}

int amp_bit(const TargetSpec& spec, int k, std::uint64_t x) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "bit index k must be >= 1");
    if (x >= spec.n_states) return 0;
    if (!spec.amp_bit_words.empty()) {
        if (k > kMaxWordBits) return 0;
        return static_cast<int>((spec.amp_bit_words[x] >> (kMaxWordBits - k)) & 1U);
    }
    return binary_digit(spec.scaled_amplitude(x), k);
}

int phase_bit(const TargetSpec& spec, int k, std::uint64_t x) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "bit index k must be >= 1");
    return binary_digit(spec.phases[x], k);
}

double truncated_phase(const TargetSpec& spec, std::uint64_t x) {
    double phi = 0.0;
    for (int k = 1; k <= spec.phase_bits; ++k) {
        if (phase_bit(spec, k, x)) phi += std::ldexp(1.0, -k);
    }
    return phi;
}

std::string to_string(const Prefix& prefix) {
    std::string s;
    s.reserve(static_cast<std::size_t>(prefix.level));
    for (int j = 1; j <= prefix.level; ++j) s.push_back(prefix.bit(j) ? '1' : '0');
    return s;
}

int OraclePack::amp_bit(int k, std::uint64_t x) const {
    if (k < 1 || k > amp_bits_) {
        throw Error(ErrorCode::InvalidArgument, "bit index outside [1, T]");
    }
    if (x >= payload_size_) return 0;
    return static_cast<int>((codes_[x] >> (amp_bits_ - k)) & 1U);
}

Prefix OraclePack::prefix_of(std::uint64_t x, int level) const {
    if (level < 0 || level > amp_bits_) {
        throw Error(ErrorCode::InvalidArgument, "prefix level outside [0, T]");
    }
    if (x >= payload_size_) return {level, 0};
    return {level, codes_[x] >> (amp_bits_ - level)};
}

std::uint64_t OraclePack::solutions(int k) const {
    if (k < 1 || k > amp_bits_) throw Error(ErrorCode::InvalidArgument, "bit index outside [1, T]");
    return solutions_[static_cast<std::size_t>(k)];
}

std::uint64_t OraclePack::class_count(const Prefix& prefix, CountConvention convention) const {
    if (prefix.level < 0 || prefix.level > amp_bits_) {
        throw Error(ErrorCode::InvalidArgument, "prefix level outside [0, T]");
    }
    const auto& level = classes_[static_cast<std::size_t>(prefix.level)];
    const auto it = level.find(prefix.bits);
    std::uint64_t count = it == level.end() ? 0 : it->second;
    if (convention == CountConvention::Extended && prefix.bits == 0) {
        count += domain_size_ - payload_size_;
    }
    return count;
}

const std::map<std::uint64_t, std::uint64_t>& OraclePack::payload_classes(int level) const {
    if (level < 0 || level > amp_bits_) {
        throw Error(ErrorCode::InvalidArgument, "prefix level outside [0, T]");
    }
    return classes_[static_cast<std::size_t>(level)];
}

int refined_oracle(const OraclePack& pack, const Prefix& prefix, std::uint64_t x) {
    int product = 1;
    for (int k = 1; k <= prefix.level; ++k) {
        product *= std::abs(pack.amp_bit(k, x) - 1 + prefix.bit(k));
    }
    return product;
}

OraclePack count_classes(const TargetSpec& spec, std::uint64_t max_amplitudes) {
    require_valid(spec);
    if (spec.amp_bits > 63) {
        throw Error(ErrorCode::InvalidArgument, "class codes support at most 63 amplitude bits");
    }
    const std::uint64_t domain = spec.domain_size();
    if (domain > max_amplitudes) {
        throw Error(ErrorCode::DomainTooLarge, "2^a N = " + std::to_string(domain) +
                                                   " exceeds the enumeration cap " +
                                                   std::to_string(max_amplitudes));
    }

    OraclePack pack;
    pack.amp_bits_ = spec.amp_bits;
    pack.payload_size_ = spec.n_states;
    pack.domain_size_ = domain;
    pack.codes_.resize(spec.n_states);
    pack.solutions_.assign(static_cast<std::size_t>(spec.amp_bits) + 1, 0);
    pack.classes_.resize(static_cast<std::size_t>(spec.amp_bits) + 1);

    const int depth = spec.amp_bits;
    for (std::uint64_t x = 0; x < spec.n_states; ++x) {
        std::uint64_t code = 0;
        for (int k = 1; k <= depth; ++k) {
            const int c = amp_bit(spec, k, x);
            code = (code << 1) | static_cast<std::uint64_t>(c);
            pack.solutions_[static_cast<std::size_t>(k)] += static_cast<std::uint64_t>(c);
        }
        pack.codes_[x] = code;
        for (int level = 0; level <= depth; ++level) {
            ++pack.classes_[static_cast<std::size_t>(level)][code >> (depth - level)];
        }
    }
    return pack;
}

TargetTables read_table_csv(const std::filesystem::path& path, std::uint64_t n_states) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open table file " + path.string());

    TargetTables tables{std::vector<double>(n_states, 0.0), std::vector<double>(n_states, 0.0)};
    std::vector<bool> seen(n_states, false);

    std::string line;
    if (!std::getline(in, line) || trim(line) != "x,p,phi") {
        throw Error(ErrorCode::InvalidArgument,
                    path.string() + ": expected header `x,p,phi`");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string fx, fp, fphi;
        if (!std::getline(row, fx, ',') || !std::getline(row, fp, ',') ||
            !std::getline(row, fphi)) {
            throw Error(ErrorCode::InvalidArgument,
                        path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
        }
        try {
            const auto x = std::stoull(trim(fx));
            if (x >= n_states) {
                throw Error(ErrorCode::InvalidArgument, path.string() + ":" +
                                                            std::to_string(line_no) +
                                                            ": x outside [0, N)");
            }
            if (seen[x]) {
                throw Error(ErrorCode::InvalidArgument, path.string() + ":" +
                                                            std::to_string(line_no) +
                                                            ": duplicate row for x");
            }
            seen[x] = true;
            tables.probs[x] = std::stod(trim(fp));
            tables.phases[x] = std::stod(trim(fphi));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument,
                        path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return tables;
}

}  // namespace qprep
