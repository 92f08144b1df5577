#include "qprep/biham.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace qprep::biham {
namespace {

void require_well_posed(std::uint64_t good_count, std::uint64_t domain) {
    if (good_count == 0 || good_count >= domain) {
        throw Error(ErrorCode::DegenerateSplit,
                    "oracle accepts " + std::to_string(good_count) + " of " +
                        std::to_string(domain) + " states");
    }
}

double good_bad_scale(std::uint64_t good_count, std::uint64_t domain) {
    return std::sqrt(static_cast<double>(good_count) / static_cast<double>(domain - good_count));
}

// Averages of one real component (re or im) of the state.
struct ComponentSplit {
    double g_bar = 0.0;
    double b_bar = 0.0;
};

template <class Component>
ComponentSplit component_split(const StateVector& state, const std::vector<bool>& good,
                               std::uint64_t good_count, Component part) {
    std::vector<double> g, b;
    g.reserve(good_count);
    b.reserve(state.size() - good_count);
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        (good[x] ? g : b).push_back(part(state[x]));
    }
    return {pairwise_sum(g) / static_cast<double>(g.size()),
            pairwise_sum(b) / static_cast<double>(b.size())};
}

}  // namespace

AverageSplit split_averages(const StateVector& state, const Predicate& good) {
    std::vector<double> g, b;
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        (good(x) ? g : b).push_back(state[x].real());
    }
    require_well_posed(g.size(), state.size());
    return {pairwise_sum(g) / static_cast<double>(g.size()),
            pairwise_sum(b) / static_cast<double>(b.size()), g.size(), state.size()};
}

RotationParams rotation_params(const AverageSplit& split) {
    require_well_posed(split.good_count, split.domain);
    const double r = static_cast<double>(split.good_count);
    const double d = static_cast<double>(split.domain);
    const double s = good_bad_scale(split.good_count, split.domain);

    RotationParams params;
    params.omega = std::acos(1.0 - 2.0 * r / d);
    params.alpha = std::sqrt(split.b_bar * split.b_bar + split.g_bar * split.g_bar * r / (d - r));
    // atan2 keeps the quadrant so that alpha cos(phi) = b_bar also when b_bar < 0;
    // b_bar = 0 gives sign(g_bar) pi / 2.
    params.phi_angle = std::atan2(split.g_bar * s, split.b_bar);
    return params;
}

AverageSplit predict_averages(const RotationParams& params, const AverageSplit& split, double t) {
    const double angle = params.omega * t + params.phi_angle;
    const double inv_s = 1.0 / good_bad_scale(split.good_count, split.domain);
    return {inv_s * params.alpha * std::sin(angle), params.alpha * std::cos(angle),
            split.good_count, split.domain};
}

StateVector analytic_evolve(const StateVector& state, const Predicate& good, std::uint64_t t) {
    std::vector<bool> mask(state.size());
    std::uint64_t good_count = 0;
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        mask[x] = good(x);
        good_count += mask[x] ? 1 : 0;
    }
    require_well_posed(good_count, state.size());

    const auto re = component_split(state, mask, good_count, [](Amplitude a) { return a.real(); });
    const auto im = component_split(state, mask, good_count, [](Amplitude a) { return a.imag(); });

    const auto evolve = [&](const ComponentSplit& c) {
        const AverageSplit split{c.g_bar, c.b_bar, good_count, state.size()};
        return predict_averages(rotation_params(split), split, static_cast<double>(t));
    };
    const AverageSplit re_fin = evolve(re);
    const AverageSplit im_fin = evolve(im);
    const double bad_sign = (t % 2 == 0) ? 1.0 : -1.0;

    std::vector<Amplitude> out(state.size());
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        const Amplitude a = state[x];
        if (mask[x]) {
            out[x] = {re_fin.g_bar + (a.real() - re.g_bar), im_fin.g_bar + (a.imag() - im.g_bar)};
        } else {
            out[x] = {re_fin.b_bar + bad_sign * (a.real() - re.b_bar),
                      im_fin.b_bar + bad_sign * (a.imag() - im.b_bar)};
        }
    }
    return StateVector(std::move(out));
}

double average_ratio(double g_bar, double b_bar) {
    if (b_bar != 0.0) return g_bar / b_bar;
    if (g_bar == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), g_bar);
}

IterationSolution solve_iterations(double ratio_ini, double ratio_fin, std::uint64_t good_count,
                                   std::uint64_t domain) {
    require_well_posed(good_count, domain);
    const double s = good_bad_scale(good_count, domain);
    // atan(+-inf) = +-pi/2, which is the b_bar -> 0 limit.
    double omega_t = std::atan(ratio_fin * s) - std::atan(ratio_ini * s);
    if (omega_t < 0.0) omega_t += std::numbers::pi;

    IterationSolution sol;
    sol.omega = std::acos(1.0 - 2.0 * static_cast<double>(good_count) / static_cast<double>(domain));
    sol.omega_t = omega_t;
    sol.t = omega_t / sol.omega;
    return sol;
}

IterationSolution solve_iterations(const AverageSplit& split_ini, double ratio_fin) {
    return solve_iterations(average_ratio(split_ini.g_bar, split_ini.b_bar), ratio_fin,
                            split_ini.good_count, split_ini.domain);
}

}  // namespace qprep::biham
