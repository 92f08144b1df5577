#pragma once

#include <cstdint>
#include <functional>

#include "qprep/statevector.hpp"

namespace qprep::biham {

// Marks the "good" basis states of an oracle.
using Predicate = std::function<bool(std::uint64_t)>;

// Averages of the good and bad amplitudes for an oracle accepting `good_count`
// of the `domain` basis states.
struct AverageSplit {
    double g_bar = 0.0;
    double b_bar = 0.0;
    std::uint64_t good_count = 0;
    std::uint64_t domain = 0;
};

struct RotationParams {
    double omega = 0.0;      // arccos(1 - 2 r / D)
    double alpha = 0.0;      // sqrt(b^2 + g^2 r / (D - r))
    double phi_angle = 0.0;  // rotation phase of the average trajectory
};

// Real-part averages over good and bad states. Throws DegenerateSplit when
// the predicate accepts none or all of the domain.
AverageSplit split_averages(const StateVector& state, const Predicate& good);

RotationParams rotation_params(const AverageSplit& split);

// Averages after t Grover iterations:
//   g_fin = sqrt((D - r) / r) alpha sin(omega t + phi),  b_fin = alpha cos(omega t + phi)
AverageSplit predict_averages(const RotationParams& params, const AverageSplit& split,
                              double t);

// Closed-form t-iteration evolution: good deviations from the average are
// kept, bad deviations flip sign with every iteration. Real and imaginary parts
// evolve independently because the Grover iterate is a real matrix.
StateVector analytic_evolve(const StateVector& state, const Predicate& good, std::uint64_t t);

struct IterationSolution {
    double omega_t = 0.0;  // in [0, pi)
    double t = 0.0;        // omega_t / omega, unrounded
    double omega = 0.0;
};

// Smallest nonnegative omega t taking the good/bad ratio from
// split_ini.g_bar / split_ini.b_bar to ratio_fin. Ratios may be +-infinity.
IterationSolution solve_iterations(double ratio_ini, double ratio_fin, std::uint64_t good_count,
                                   std::uint64_t domain);
IterationSolution solve_iterations(const AverageSplit& split_ini, double ratio_fin);

// g / b with the b -> 0 limit mapped to a signed infinity.
double average_ratio(double g_bar, double b_bar);

}  // namespace qprep::biham
