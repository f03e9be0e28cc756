// SPDX-License-Identifier: Apache-2.0

#include "oif/bench/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oif::bench {

BurgersProblem::BurgersProblem(std::size_t cells, double t_final)
    : n(cells), dx(2.0 / static_cast<double>(cells)), t_final(t_final) {}

std::vector<double> BurgersProblem::grid() const {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i) * dx;
    }
    return x;
}

std::vector<double> BurgersProblem::initial_state() const {
    std::vector<double> u = grid();
    for (double& v : u) {
        v = 0.5 - 0.25 * std::sin(std::numbers::pi * v);
    }
    return u;
}

extern "C" int burgers_rhs(double /*t*/, OIFArrayF64* u_arr, OIFArrayF64* udot_arr,
                           void* user_data) {
    const auto n = static_cast<std::size_t>(u_arr->dimensions[0]);
    const double* u = u_arr->data;
    double* udot = udot_arr->data;
    const double dx = static_cast<const BurgersContext*>(user_data)->dx;

    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        alpha = std::max(alpha, std::abs(u[i]));
    }

    // Periodic: the flux entering cell 0 is the one leaving cell n-1.
    double flux_left = lax_friedrichs_flux(u[n - 1], u[0], alpha);
    const double flux_wrap = flux_left;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double flux_right = lax_friedrichs_flux(u[i], u[i + 1], alpha);
        udot[i] = -(flux_right - flux_left) / dx;
        flux_left = flux_right;
    }
    udot[n - 1] = -(flux_wrap - flux_left) / dx;
    return 0;
}

double burgers_mass(std::span<const double> u, double dx) noexcept {
    double sum = 0.0;
    for (double v : u) {
        sum += v;
    }
    return sum * dx;
}

extern "C" int vdp_rhs(double /*t*/, OIFArrayF64* y_arr, OIFArrayF64* ydot_arr,
                       void* user_data) {
    const double mu = static_cast<const VdpContext*>(user_data)->mu;
    const double* y = y_arr->data;
    double* ydot = ydot_arr->data;
    ydot[0] = y[1];
    ydot[1] = mu * (1.0 - y[0] * y[0]) * y[1] - y[0];
    return 0;
}

}  // namespace oif::bench
