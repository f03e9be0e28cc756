// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oif/c_abi.h"
#include "oif/marshal.hpp"
#include "oif/status.hpp"

namespace oif::solvers {

/// Right-hand side as seen by an engine: a boundary function pointer and the
/// context it is called with.
struct Rhs {
    OIFRhsFn fn = nullptr;
    void* user_data = nullptr;
};

/// Dormand-Prince 5(4) coefficients.
struct Dopri5Tableau {
    static constexpr int kStages = 7;
    std::array<double, kStages> c;
    std::array<std::array<double, kStages>, kStages> a;
    /// 5th-order weights (b[6] == 0; the last stage only feeds the estimate).
    std::array<double, kStages> b;
    /// Embedded 4th-order weights.
    std::array<double, kStages> b_hat;
    /// b - b_hat.
    std::array<double, kStages> e;
};

const Dopri5Tableau& dopri5_tableau();

struct Dopri5Config {
    double reltol = 1e-6;
    double abstol = 1e-12;
    /// Empty means "pick with initial_step_heuristic".
    std::optional<double> h_init;
    double h_max = std::numeric_limits<double>::infinity();
    std::int32_t max_steps = 100000;
    double safety = 0.9;
    double fac_min = 0.2;
    double fac_max = 10.0;
    /// false: fixed steps of h_init, every step accepted.
    bool adaptive = true;
    /// Accepted steps between stiffness tests; 0 disables the test.
    std::int32_t stiffness_interval = 1000;

    /// Throws Error(kInvalidArgument) naming the offending field.
    void validate() const;
};

/// Applies integrator options: max_steps, adaptive, stiffness_interval
/// (int); h_init, h_max,
/// safety, fac_min, fac_max (float, ints widened). Throws
/// Error(kInvalidArgument) naming an unknown key or a wrongly typed value,
/// and validates the result.
Dopri5Config with_options(Dopri5Config base, const ConfigDict& options);

/// Consecutive rejections after which the run is declared stiff.
inline constexpr int kStiffRejectionStreak = 50;

/// Stiffness test: an accepted step with h * |lambda| above
/// kStiffStabilityBound counts as stiff; kStiffDetections stiff steps in a
/// row without kNonStiffReset non-stiff ones in between end the run.
inline constexpr double kStiffStabilityBound = 3.25;
inline constexpr int kStiffDetections = 15;
inline constexpr int kNonStiffReset = 6;

/// Scaled RMS norm of `v` with weights abstol + reltol * max(|y|, |y_new|).
double scaled_rms_norm(std::span<const double> v, std::span<const double> y,
                       std::span<const double> y_new, double reltol, double abstol);

/// Starting step from the |y|/|f| scaling with one trial Euler step.
/// `f0` must hold f(t0, y0). Returns 1e-6 when f0 is identically zero.
/// Throws Error(kSolverFailure) if the trial evaluation fails.
double initial_step_heuristic(const Rhs& rhs, double t0, std::span<const double> y0,
                              std::span<const double> f0, double reltol, double abstol);

/// Stage storage for one trial step of an n-dimensional system.
class Dopri5Workspace {
  public:
    explicit Dopri5Workspace(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    /// k[0] must hold f(t, y) before a step; after it k[6] holds f(t+h, y5).
    std::span<double> stage(int i) noexcept { return {k_[i].data(), n_}; }
    /// Moves f(t+h, y5) into the first stage after an accepted step.
    void promote_last_stage() noexcept { k_[0].swap(k_[6]); }
    /// Estimate of the dominant |lambda| of the Jacobian from the last two
    /// stages of the most recent step, both evaluated at t+h. Zero when the
    /// two stage arguments coincide.
    double dominant_eigenvalue_estimate(std::span<const double> y5) const noexcept;

  private:
    friend struct Dopri5StepAccess;
    std::size_t n_;
    std::array<std::vector<double>, Dopri5Tableau::kStages> k_;
    std::vector<double> y_stage_;
    std::vector<double> err_;
    std::intptr_t dims_[2] = {0, 0};
    OIFArrayF64 in_view_{};
    OIFArrayF64 out_view_{};
};

/// One trial step of size h from (t, y). Writes the 5th-order candidate
/// into y5 and the scaled error estimate into err_norm. Uses and preserves
/// ws.stage(0) = f(t, y); evaluates the right-hand side six times.
/// Returns kSolverFailure if the right-hand side reports an error.
Status dopri5_step(const Rhs& rhs, double t, std::span<const double> y, double h,
                   const Dopri5Config& config, Dopri5Workspace& ws, std::span<double> y5,
                   double& err_norm);

/// Adaptive Dormand-Prince integrator with step continuation across
/// integrate calls.
class Dopri5 {
  public:
    Dopri5() = default;

    /// Throws Error(kInvalidArgument) on an invalid configuration.
    void set_config(const Dopri5Config& config);
    const Dopri5Config& config() const noexcept { return config_; }
    void set_rhs(Rhs rhs) noexcept;

    /// Resets progress: next integrate starts from (t0, y0).
    void reset(double t0, std::span<const double> y0);

    /// Advances to exactly t_target and writes the state into y_out.
    Status integrate(double t_target, std::span<double> y_out);

    double time() const noexcept { return t_; }
    std::span<const double> state() const noexcept { return y_; }
    /// Step proposed for the next trial.
    double next_step() const noexcept { return h_; }

    std::int64_t accepted_steps() const noexcept { return accepted_; }
    std::int64_t rejected_steps() const noexcept { return rejected_; }
    std::int64_t rhs_evaluations() const noexcept { return rhs_evals_; }

  private:
    Status eval(double t, std::span<const double> y, std::span<double> out);

    Dopri5Config config_;
    Rhs rhs_;
    double t_ = 0.0;
    double h_ = 0.0;
    std::vector<double> y_;
    std::vector<double> y_new_;
    std::optional<Dopri5Workspace> ws_;
    bool have_f_ = false;
    int stiff_count_ = 0;
    int non_stiff_count_ = 0;
    std::int64_t accepted_ = 0;
    std::int64_t rejected_ = 0;
    std::int64_t rhs_evals_ = 0;
};

}  // namespace oif::solvers
