#include "qprep_cli/config.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qprep::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, "config: " + what);
}

template <class T>
T get(const json& doc, const char* key) {
    if (!doc.contains(key)) bad_config(std::string("missing field `") + key + "`");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        bad_config(std::string("field `") + key + "` has the wrong type");
    }
}

template <class T>
std::optional<T> get_optional(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return get<T>(doc, key);
}

void reject_unknown(const json& doc, std::initializer_list<const char*> known, const char* where) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : doc.items()) {
        if (!allowed.contains(key)) bad_config(std::string("unknown field `") + key + "` in " + where);
    }
}

Distribution parse_distribution(const json& doc) {
    if (!doc.is_object()) bad_config("`distribution` must be an object");
    const auto family = get<std::string>(doc, "family");
    if (family == "uniform") {
        reject_unknown(doc, {"family"}, "distribution");
        return Uniform{};
    }
    if (family == "truncated-geometric") {
        reject_unknown(doc, {"family", "ratio"}, "distribution");
        return TruncatedGeometric{get<double>(doc, "ratio")};
    }
    if (family == "discretized-gaussian") {
        reject_unknown(doc, {"family", "mean", "sigma"}, "distribution");
        return DiscretizedGaussian{get_optional<double>(doc, "mean"),
                                   get_optional<double>(doc, "sigma")};
    }
    if (family == "table") {
        reject_unknown(doc, {"family", "path"}, "distribution");
        return TableFile{get<std::string>(doc, "path")};
    }
    bad_config("unknown distribution family `" + family + "`");
}

PhaseProfile parse_phase(const json& doc) {
    if (!doc.is_object()) bad_config("`phase_profile` must be an object");
    const auto kind = get<std::string>(doc, "kind");
    if (kind == "zero") {
        reject_unknown(doc, {"kind"}, "phase_profile");
        return ZeroPhase{};
    }
    if (kind == "linear") {
        reject_unknown(doc, {"kind", "slope"}, "phase_profile");
        return LinearPhase{get<double>(doc, "slope")};
    }
    if (kind == "quadratic") {
        reject_unknown(doc, {"kind", "chirp"}, "phase_profile");
        return QuadraticPhase{get<double>(doc, "chirp")};
    }
    if (kind == "random") {
        reject_unknown(doc, {"kind", "seed"}, "phase_profile");
        return RandomPhase{get_optional<std::uint64_t>(doc, "seed")};
    }
    if (kind == "table") {
        reject_unknown(doc, {"kind", "path"}, "phase_profile");
        return TableFile{get<std::string>(doc, "path")};
    }
    bad_config("unknown phase profile `" + kind + "`");
}

json distribution_to_json(const Distribution& dist) {
    return std::visit(
        [](const auto& d) -> json {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, Uniform>) {
                return {{"family", "uniform"}};
            } else if constexpr (std::is_same_v<D, TruncatedGeometric>) {
                return {{"family", "truncated-geometric"}, {"ratio", d.ratio}};
            } else if constexpr (std::is_same_v<D, DiscretizedGaussian>) {
                json j = {{"family", "discretized-gaussian"}};
                if (d.mean) j["mean"] = *d.mean;
                if (d.sigma) j["sigma"] = *d.sigma;
                return j;
            } else {
                return {{"family", "table"}, {"path", d.path}};
            }
        },
        dist);
}

json phase_to_json(const PhaseProfile& profile) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ZeroPhase>) {
                return {{"kind", "zero"}};
            } else if constexpr (std::is_same_v<P, LinearPhase>) {
                return {{"kind", "linear"}, {"slope", p.slope}};
            } else if constexpr (std::is_same_v<P, QuadraticPhase>) {
                return {{"kind", "quadratic"}, {"chirp", p.chirp}};
            } else if constexpr (std::is_same_v<P, RandomPhase>) {
                json j = {{"kind", "random"}};
                if (p.seed) j["seed"] = *p.seed;
                return j;
            } else {
                return {{"kind", "table"}, {"path", p.path}};
            }
        },
        profile);
}

CountConvention parse_convention(const std::string& s) {
    if (s == "extended") return CountConvention::Extended;
    if (s == "paper-literal") return CountConvention::PaperLiteral;
    bad_config("unknown convention `" + s + "`");
}

Rounding parse_rounding(const std::string& s) {
    if (s == "structure-preserving") return Rounding::StructurePreserving;
    if (s == "nearest") return Rounding::Nearest;
    bad_config("unknown rounding `" + s + "`");
}

MeasurementMode parse_mode(const std::string& s) {
    if (s == "project") return MeasurementMode::Project;
    if (s == "sample") return MeasurementMode::Sample;
    bad_config("unknown mode `" + s + "`");
}

std::filesystem::path resolve(const std::string& path, const std::filesystem::path& base_dir) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : base_dir / p;
}

double frac(double v) {
    const double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
}

std::vector<double> normalized(std::vector<double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "distribution has no mass");
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

InstanceConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad_config(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) bad_config("top level must be an object");
    reject_unknown(doc,
                   {"distribution", "phase_profile", "N", "a", "T", "T'", "eta", "convention",
                    "rounding", "mode", "seed", "max_retries"},
                   "config");

    InstanceConfig c;
    c.distribution = parse_distribution(doc.contains("distribution") ? doc["distribution"]
                                                                      : json{{"family", "uniform"}});
    c.phase_profile =
        parse_phase(doc.contains("phase_profile") ? doc["phase_profile"] : json{{"kind", "zero"}});
    c.n_states = get<std::uint64_t>(doc, "N");
    c.aux_qubits = get<int>(doc, "a");
    c.amp_bits = get_optional<int>(doc, "T");
    c.phase_bits = get<int>(doc, "T'");
    c.eta = get_optional<double>(doc, "eta");
    if (auto s = get_optional<std::string>(doc, "convention")) c.convention = parse_convention(*s);
    if (auto s = get_optional<std::string>(doc, "rounding")) c.rounding = parse_rounding(*s);
    if (auto s = get_optional<std::string>(doc, "mode")) c.mode = parse_mode(*s);
    c.seed = get_optional<std::uint64_t>(doc, "seed").value_or(0);
    c.max_retries = get_optional<int>(doc, "max_retries").value_or(16);
    return c;
}

InstanceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const InstanceConfig& c) {
    json doc;
    doc["distribution"] = distribution_to_json(c.distribution);
    doc["phase_profile"] = phase_to_json(c.phase_profile);
    doc["N"] = c.n_states;
    doc["a"] = c.aux_qubits;
    if (c.amp_bits) doc["T"] = *c.amp_bits;
    doc["T'"] = c.phase_bits;
    if (c.eta) doc["eta"] = *c.eta;
    doc["convention"] = std::string(to_string(c.convention));
    doc["rounding"] = std::string(to_string(c.rounding));
    doc["mode"] = c.mode == MeasurementMode::Project ? "project" : "sample";
    doc["seed"] = c.seed;
    doc["max_retries"] = c.max_retries;
    return doc.dump(2);
}

std::vector<double> distribution_probs(const Distribution& dist, std::uint64_t n,
                                       const std::filesystem::path& base_dir) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "N must be positive");
    std::vector<double> w(n, 1.0);
    if (const auto* g = std::get_if<TruncatedGeometric>(&dist)) {
        if (!(g->ratio > 0.0)) throw Error(ErrorCode::InvalidArgument, "geometric ratio must be > 0");
        for (std::uint64_t x = 0; x < n; ++x) w[x] = std::pow(g->ratio, static_cast<double>(x));
    } else if (const auto* g = std::get_if<DiscretizedGaussian>(&dist)) {
        const double mean = g->mean.value_or(0.5 * static_cast<double>(n - 1));
        const double sigma = g->sigma.value_or(0.25 * static_cast<double>(n));
        if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian sigma must be > 0");
        for (std::uint64_t x = 0; x < n; ++x) {
            const double z = (static_cast<double>(x) - mean) / sigma;
            w[x] = std::exp(-0.5 * z * z);
        }
    } else if (const auto* t = std::get_if<TableFile>(&dist)) {
        return read_table_csv(resolve(t->path, base_dir), n).probs;
    }
    return normalized(std::move(w));
}

std::vector<double> phase_values(const PhaseProfile& profile, std::uint64_t n,
                                 std::uint64_t config_seed, const std::filesystem::path& base_dir) {
    std::vector<double> phi(n, 0.0);
    if (const auto* l = std::get_if<LinearPhase>(&profile)) {
        for (std::uint64_t x = 0; x < n; ++x) phi[x] = frac(l->slope * static_cast<double>(x));
    } else if (const auto* q = std::get_if<QuadraticPhase>(&profile)) {
        for (std::uint64_t x = 0; x < n; ++x) {
            const double xd = static_cast<double>(x);
            phi[x] = frac(q->chirp * xd * xd);
        }
    } else if (const auto* r = std::get_if<RandomPhase>(&profile)) {
        std::mt19937_64 rng(r->seed.value_or(config_seed));
        for (auto& v : phi) v = std::ldexp(static_cast<double>(rng() >> 11), -53);
    } else if (const auto* t = std::get_if<TableFile>(&profile)) {
        return read_table_csv(resolve(t->path, base_dir), n).phases;
    }
    return phi;
}

std::uint64_t max_amplitudes_from_env() {
    const char* env = std::getenv("QPREP_MAX_AMPS");
    if (env == nullptr || *env == '\0') return kDefaultMaxAmplitudes;
    try {
        std::size_t used = 0;
        const auto value = std::stoull(env, &used);
        if (used == std::string(env).size() && value > 0) return value;
    } catch (const std::logic_error&) {
    }
    throw Error(ErrorCode::InvalidArgument, std::string("QPREP_MAX_AMPS=") + env +
                                                " is not a positive integer");
}

RunConfig to_run_config(const InstanceConfig& config, const std::filesystem::path& base_dir) {
    RunConfig run;
    TargetSpec& spec = run.spec;
    spec.n_states = config.n_states;
    spec.aux_qubits = config.aux_qubits;
    spec.phase_bits = config.phase_bits;
    if (config.amp_bits) {
        spec.amp_bits = *config.amp_bits;
    } else {
        if (config.aux_qubits < 1) throw Error(ErrorCode::InvalidArgument, "a must be >= 1");
        spec.amp_bits = choose_T(config.aux_qubits);
    }
    if (!std::has_single_bit(config.n_states)) {
        throw Error(ErrorCode::NotPowerOfTwo,
                    "N = " + std::to_string(config.n_states) + " is not a power of two");
    }
    spec.probs = distribution_probs(config.distribution, config.n_states, base_dir);
    spec.phases = phase_values(config.phase_profile, config.n_states, config.seed, base_dir);
    spec.eta = config.eta ? *config.eta : default_eta(spec.probs);
    require_valid(spec);

    run.schedule.convention = config.convention;
    run.schedule.rounding = config.rounding;
    run.mode = config.mode;
    run.seed = config.seed;
    run.max_retries = config.max_retries;
    run.max_amplitudes = max_amplitudes_from_env();
    return run;
}

}  // namespace qprep::cli
