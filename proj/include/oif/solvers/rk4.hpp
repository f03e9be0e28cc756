// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oif/solvers/dopri5.hpp"
#include "oif/status.hpp"

namespace oif::solvers {

/// Classical fourth-order Runge-Kutta with a fixed step.
///
/// Steps are taken on the grid t0 + k*dt. A target between grid points is
/// reached by one shortened step from the last grid point, which does not
/// move the grid state, so integrate(t1) followed by integrate(t2) gives the
/// same result as integrate(t2) alone.
class Rk4 {
  public:
    static constexpr double kDefaultStep = 1e-3;

    /// Throws Error(kInvalidArgument) unless dt > 0 and finite.
    void set_step(double dt);
    double step() const noexcept { return dt_; }
    void set_rhs(Rhs rhs) noexcept { rhs_ = rhs; }

    void reset(double t0, std::span<const double> y0);
    Status integrate(double t_target, std::span<double> y_out);

    double time() const noexcept { return t_; }
    std::int64_t rhs_evaluations() const noexcept { return rhs_evals_; }

  private:
    Status advance(double t, double h, std::span<const double> y, std::span<double> out);

    Rhs rhs_;
    double dt_ = kDefaultStep;
    double t0_ = 0.0;
    double t_ = 0.0;
    std::int64_t k_ = 0;
    std::vector<double> y_grid_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_, next_;
    std::int64_t rhs_evals_ = 0;
    bool ready_ = false;
};

}  // namespace oif::solvers
