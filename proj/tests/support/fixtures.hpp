#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qprep/pipeline.hpp"

namespace fixtures {

inline std::vector<double> uniform(std::uint64_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

inline std::vector<double> geometric(std::uint64_t n, double ratio = 0.5) {
    std::vector<double> p(n);
    double total = 0.0;
    for (std::uint64_t x = 0; x < n; ++x) total += p[x] = std::pow(ratio, static_cast<double>(x));
    for (auto& v : p) v /= total;
    return p;
}

inline std::vector<double> gaussian(std::uint64_t n) {
    const double mean = 0.5 * static_cast<double>(n - 1);
    const double sigma = 0.25 * static_cast<double>(n);
    std::vector<double> p(n);
    double total = 0.0;
    for (std::uint64_t x = 0; x < n; ++x) {
        const double z = (static_cast<double>(x) - mean) / sigma;
        total += p[x] = std::exp(-0.5 * z * z);
    }
    for (auto& v : p) v /= total;
    return p;
}

// (1/2, 1/4, 1/8, 1/8) followed by zeros.
inline std::vector<double> padded(std::uint64_t n) {
    std::vector<double> p(n, 0.0);
    p[0] = 0.5;
    p[1] = 0.25;
    p[2] = 0.125;
    p[3] = 0.125;
    return p;
}

inline qprep::TargetSpec make_spec(std::vector<double> probs, int a, int t_prime = 3,
                                   std::vector<double> phases = {}) {
    qprep::TargetSpec spec;
    spec.n_states = probs.size();
    spec.eta = qprep::default_eta(probs);
    spec.probs = std::move(probs);
    spec.phases = phases.empty() ? std::vector<double>(spec.n_states, 0.0) : std::move(phases);
    spec.aux_qubits = a;
    spec.amp_bits = qprep::choose_T(a);
    spec.phase_bits = t_prime;
    return spec;
}

inline qprep::RunConfig make_config(qprep::TargetSpec spec) {
    qprep::RunConfig config;
    config.spec = std::move(spec);
    return config;
}

}  // namespace fixtures
