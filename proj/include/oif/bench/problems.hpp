// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oif/c_abi.h"

namespace oif::bench {

/// Inviscid Burgers' equation u_t + (u^2/2)_x = 0 on [0, 2), periodic,
/// discretized by finite volumes with a global Lax-Friedrichs flux.
struct BurgersProblem {
    std::size_t n = 0;
    double dx = 0.0;
    double t0 = 0.0;
    double t_final = 2.0;

    explicit BurgersProblem(std::size_t cells, double t_final = 2.0);

    /// x_i = i * dx, i = 0..n-1.
    std::vector<double> grid() const;
    /// u_i(0) = 0.5 - 0.25 sin(pi x_i).
    std::vector<double> initial_state() const;
};

/// Context handed to burgers_rhs as user data.
struct BurgersContext {
    double dx;
};

/// Interface flux for left state a, right state b and wave-speed bound alpha.
inline double lax_friedrichs_flux(double a, double b, double alpha) noexcept {
    return ((0.5 * a * a + 0.5 * b * b) - alpha * (b - a)) * 0.5;
}

/// udot_i = -(F_{i+1/2} - F_{i-1/2}) / dx with alpha = max_j |u_j|
/// recomputed on every call. `user_data` points to a BurgersContext.
extern "C" int burgers_rhs(double t, OIFArrayF64* u, OIFArrayF64* udot, void* user_data);

/// Sum of u_i * dx.
double burgers_mass(std::span<const double> u, double dx) noexcept;

/// Van der Pol oscillator x'' - mu (1 - x^2) x' + x = 0 as a first-order
/// system y = (x, x'), started from x(0) = 2, x'(0) = 0.
struct VdpProblem {
    double mu = 1000.0;
    double t0 = 0.0;
    double t_final = 3000.0;

    std::vector<double> initial_state() const { return {2.0, 0.0}; }
};

struct VdpContext {
    double mu;
};

/// ydot = (y2, mu (1 - y1^2) y2 - y1). `user_data` points to a VdpContext.
extern "C" int vdp_rhs(double t, OIFArrayF64* y, OIFArrayF64* ydot, void* user_data);

}  // namespace oif::bench
