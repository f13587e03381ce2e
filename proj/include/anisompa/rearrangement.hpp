#pragma once

#include "anisompa/gfunction.hpp"
#include "anisompa/scalar_function.hpp"

#include <cstdint>

namespace anisompa {

// Lebesgue volume of the sublevel set { v : Phi(v) <= t }, either via the
// closed-form Dirichlet integral (power sums) or Monte Carlo over a bounding
// box found from the axis intercepts.
struct VolumeModel {
    enum class Method { ExactDirichlet, MonteCarlo };
    Method method = Method::ExactDirichlet;
    std::int64_t samples = 100'000;
    std::uint64_t seed = 0;
    double box_inflation = 1.01;
};

struct VolumeEstimate {
    double volume = 0.0;
    double std_error = 0.0; // zero on the exact path
};

VolumeEstimate level_set_volume(const GFunction& phi, double t, const VolumeModel& model = {});

double unit_ball_volume(int n);

// Radial rearrangement Phi_circ of Phi: the radial profile whose sublevel
// balls match the Phi sublevel volumes,  omega_n r^n = vol{Phi <= Phi_circ(r)}.
// Each table entry solves the volume equation by bisection in t.
struct PhiCircGrid {
    double r_min = 1e-3;
    double r_max = 1e3;
    int count = 200;
};

ScalarFunction compute_phi_circ(const GFunction& phi, const PhiCircGrid& grid = {},
                                const VolumeModel& model = {});

} // namespace anisompa
