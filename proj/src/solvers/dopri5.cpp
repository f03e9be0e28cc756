// SPDX-License-Identifier: Apache-2.0

#include "oif/solvers/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oif::solvers {

const Dopri5Tableau& dopri5_tableau() {
    static const Dopri5Tableau t = [] {
        Dopri5Tableau d{};
        d.c = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
        d.a[1] = {1.0 / 5.0};
        d.a[2] = {3.0 / 40.0, 9.0 / 40.0};
        d.a[3] = {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
        d.a[4] = {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0};
        d.a[5] = {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
                  -5103.0 / 18656.0};
        d.a[6] = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                  11.0 / 84.0};
        d.b = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0,
               0.0};
        d.b_hat = {5179.0 / 57600.0,    0.0,           7571.0 / 16695.0, 393.0 / 640.0,
                   -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};
        d.e = {71.0 / 57600.0,      0.0,          -71.0 / 16695.0, 71.0 / 1920.0,
               -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};
        return d;
    }();
    return t;
}

void Dopri5Config::validate() const {
    auto fail = [](const std::string& what) {
        throw Error(ErrorCode::kInvalidArgument, "dopri5: " + what);
    };
    if (!(reltol > 0.0)) fail("reltol must be positive");
    if (!(abstol >= 0.0)) fail("abstol must be non-negative");
    if (h_init && !(*h_init > 0.0 && std::isfinite(*h_init))) fail("h_init must be positive");
    if (!(h_max > 0.0)) fail("h_max must be positive");
    if (max_steps <= 0) fail("max_steps must be positive");
    if (stiffness_interval < 0) fail("stiffness_interval must be non-negative");
    if (!(safety > 0.0 && safety < 1.0)) fail("safety must lie in (0, 1)");
    if (!(fac_min > 0.0 && fac_min < 1.0)) fail("fac_min must lie in (0, 1)");
    if (!(fac_max > 1.0)) fail("fac_max must exceed 1");
    if (!adaptive && !h_init) fail("fixed-step mode needs h_init");
}

Dopri5Config with_options(Dopri5Config config, const ConfigDict& options) {
    for (const auto& [key, value] : options.entries()) {
        const auto* as_int = std::get_if<std::int32_t>(&value);
        const double as_double = as_int ? static_cast<double>(*as_int) : std::get<double>(value);
        auto need_int = [&]() {
            if (as_int == nullptr) {
                throw Error(ErrorCode::kInvalidArgument,
                            "dopri5: option '" + key + "' must be an integer");
            }
            return *as_int;
        };
        if (key == "max_steps") {
            config.max_steps = need_int();
        } else if (key == "stiffness_interval") {
            config.stiffness_interval = need_int();
        } else if (key == "adaptive") {
            config.adaptive = need_int() != 0;
        } else if (key == "h_init") {
            config.h_init = as_double;
        } else if (key == "h_max") {
            config.h_max = as_double;
        } else if (key == "safety") {
            config.safety = as_double;
        } else if (key == "fac_min") {
            config.fac_min = as_double;
        } else if (key == "fac_max") {
            config.fac_max = as_double;
        } else {
            throw Error(ErrorCode::kInvalidArgument,
                        "dopri5: unknown option '" + key + "'");
        }
    }
    config.validate();
    return config;
}

double scaled_rms_norm(std::span<const double> v, std::span<const double> y,
                       std::span<const double> y_new, double reltol, double abstol) {
    if (v.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double sc = abstol + reltol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = v[i] / sc;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(v.size()));
}

namespace {

int call_rhs(const Rhs& rhs, double t, const double* y, double* out, std::size_t n) {
    std::intptr_t dims[1] = {static_cast<std::intptr_t>(n)};
    OIFArrayF64 in{1, dims, const_cast<double*>(y)};
    OIFArrayF64 res{1, dims, out};
    return rhs.fn(t, &in, &res, rhs.user_data);
}

Status rhs_failure(int code, double t) {
    std::ostringstream msg;
    msg << "dopri5: right-hand side returned " << code << " at t=" << t;
    return {ErrorCode::kSolverFailure, msg.str()};
}

}  // namespace

double initial_step_heuristic(const Rhs& rhs, double t0, std::span<const double> y0,
                              std::span<const double> f0, double reltol, double abstol) {
    const double d1 = scaled_rms_norm(f0, y0, y0, reltol, abstol);
    if (d1 == 0.0) {
        return 1e-6;
    }
    const double d0 = scaled_rms_norm(y0, y0, y0, reltol, abstol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;

    const std::size_t n = y0.size();
    std::vector<double> y1(n);
    std::vector<double> f1(n);
    for (std::size_t i = 0; i < n; ++i) {
        y1[i] = y0[i] + h0 * f0[i];
    }
    if (const int rc = call_rhs(rhs, t0 + h0, y1.data(), f1.data(), n); rc != 0) {
        const Status s = rhs_failure(rc, t0 + h0);
        throw Error(s.code(), s.message());
    }
    for (std::size_t i = 0; i < n; ++i) {
        f1[i] -= f0[i];
    }
    const double d2 = scaled_rms_norm(f1, y0, y0, reltol, abstol) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min(100.0 * h0, h1);
}

Dopri5Workspace::Dopri5Workspace(std::size_t n) : n_(n), y_stage_(n), err_(n) {
    for (auto& k : k_) {
        k.assign(n, 0.0);
    }
    dims_[0] = static_cast<std::intptr_t>(n);
    in_view_ = {1, dims_, y_stage_.data()};
    out_view_ = {1, dims_, nullptr};
}

double Dopri5Workspace::dominant_eigenvalue_estimate(std::span<const double> y5) const noexcept {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double df = k_[6][i] - k_[5][i];
        const double dy = y5[i] - y_stage_[i];
        num += df * df;
        den += dy * dy;
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

struct Dopri5StepAccess {
    static Status step(const Rhs& rhs, double t, std::span<const double> y, double h,
                       const Dopri5Config& config, Dopri5Workspace& ws, std::span<double> y5,
                       double& err_norm) {
        const auto& tab = dopri5_tableau();
        const std::size_t n = ws.n_;
        auto& k = ws.k_;
        double* ys = ws.y_stage_.data();

        auto eval = [&](int stage, double ts, const double* at) -> int {
            ws.in_view_.data = const_cast<double*>(at);
            ws.out_view_.data = k[stage].data();
            return rhs.fn(ts, &ws.in_view_, &ws.out_view_, rhs.user_data);
        };

        for (int s = 1; s < 6; ++s) {
            const auto& a = tab.a[s];
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) {
                    acc += a[j] * k[j][i];
                }
                ys[i] = y[i] + h * acc;
            }
            if (const int rc = eval(s, t + tab.c[s] * h, ys); rc != 0) {
                return rhs_failure(rc, t + tab.c[s] * h);
            }
        }

        // Order 1, 4, 3, 5, 6 sums the weights to exactly 1 in binary64.
        const auto& b = tab.b;
        for (std::size_t i = 0; i < n; ++i) {
            const double acc =
                b[0] * k[0][i] + b[3] * k[3][i] + b[2] * k[2][i] + b[4] * k[4][i] + b[5] * k[5][i];
            y5[i] = y[i] + h * acc;
        }
        if (const int rc = eval(6, t + h, y5.data()); rc != 0) {
            return rhs_failure(rc, t + h);
        }

        const auto& e = tab.e;
        double* err = ws.err_.data();
        for (std::size_t i = 0; i < n; ++i) {
            err[i] = h * (e[0] * k[0][i] + e[2] * k[2][i] + e[3] * k[3][i] + e[4] * k[4][i] +
                          e[5] * k[5][i] + e[6] * k[6][i]);
        }
        err_norm = scaled_rms_norm({err, n}, y, y5, config.reltol, config.abstol);
        return Status::ok();
    }
};

Status dopri5_step(const Rhs& rhs, double t, std::span<const double> y, double h,
                   const Dopri5Config& config, Dopri5Workspace& ws, std::span<double> y5,
                   double& err_norm) {
    return Dopri5StepAccess::step(rhs, t, y, h, config, ws, y5, err_norm);
}

// Dopri5 ---------------------------------------------------------------------

void Dopri5::set_config(const Dopri5Config& config) {
    config.validate();
    config_ = config;
    h_ = 0.0;
}

void Dopri5::set_rhs(Rhs rhs) noexcept {
    rhs_ = rhs;
    have_f_ = false;
}

void Dopri5::reset(double t0, std::span<const double> y0) {
    t_ = t0;
    y_.assign(y0.begin(), y0.end());
    y_new_.assign(y0.size(), 0.0);
    if (!ws_ || ws_->size() != y0.size()) {
        ws_.emplace(y0.size());
    }
    h_ = 0.0;
    have_f_ = false;
    stiff_count_ = non_stiff_count_ = 0;
    accepted_ = rejected_ = rhs_evals_ = 0;
}

Status Dopri5::eval(double t, std::span<const double> y, std::span<double> out) {
    ++rhs_evals_;
    if (const int rc = call_rhs(rhs_, t, y.data(), out.data(), y.size()); rc != 0) {
        return rhs_failure(rc, t);
    }
    return Status::ok();
}

Status Dopri5::integrate(double t_target, std::span<double> y_out) {
    if (rhs_.fn == nullptr || !ws_) {
        return {ErrorCode::kInvalidArgument, "dopri5: initial value and RHS must be set"};
    }
    if (y_out.size() != y_.size()) {
        return {ErrorCode::kInvalidArgument, "dopri5: output size differs from state size"};
    }
    if (!(t_target >= t_)) {
        std::ostringstream msg;
        msg << "dopri5: target time " << t_target << " precedes current time " << t_;
        return {ErrorCode::kInvalidArgument, msg.str()};
    }
    if (t_target == t_) {
        std::copy(y_.begin(), y_.end(), y_out.begin());
        return Status::ok();
    }

    Dopri5Workspace& ws = *ws_;
    if (!have_f_) {
        if (Status s = eval(t_, y_, ws.stage(0)); !s.is_ok()) {
            return s;
        }
        have_f_ = true;
    }
    if (h_ <= 0.0) {
        try {
            h_ = config_.h_init ? *config_.h_init
                                : initial_step_heuristic(rhs_, t_, y_, ws.stage(0),
                                                         config_.reltol, config_.abstol);
        } catch (const Error& e) {
            return e.status();
        }
        if (!config_.h_init) {
            ++rhs_evals_;
        }
    }

    constexpr double kEps = std::numeric_limits<double>::epsilon();
    const double expo = 1.0 / 5.0;
    std::int32_t steps = 0;
    int reject_streak = 0;

    while (t_ < t_target) {
        if (steps >= config_.max_steps) {
            std::ostringstream msg;
            msg << "dopri5: more than max_steps=" << config_.max_steps
                << " steps needed before t=" << t_target << " (stopped at t=" << t_ << ")";
            return {ErrorCode::kSolverFailure, msg.str()};
        }
        const double h_prop = std::min(h_, config_.h_max);
        double h = h_prop;
        bool last = false;
        if (t_ + 1.01 * h >= t_target) {
            h = t_target - t_;
            last = true;
        }
        if (h < 16.0 * kEps * std::abs(t_)) {
            std::ostringstream msg;
            msg << "dopri5: step size " << h << " underflows at t=" << t_
                << "; problem is probably stiff";
            return {ErrorCode::kSolverFailure, msg.str()};
        }

        double err = 0.0;
        if (Status s = dopri5_step(rhs_, t_, y_, h, config_, ws, y_new_, err); !s.is_ok()) {
            rhs_evals_ += 6;
            return s;
        }
        rhs_evals_ += 6;
        ++steps;

        if (!config_.adaptive || err <= 1.0) {
            ++accepted_;
            const std::int32_t every = config_.stiffness_interval;
            if (every > 0 && (accepted_ % every == 0 || stiff_count_ > 0)) {
                const double h_lambda = h * ws.dominant_eigenvalue_estimate(y_new_);
                if (h_lambda > kStiffStabilityBound) {
                    non_stiff_count_ = 0;
                    if (++stiff_count_ == kStiffDetections) {
                        std::ostringstream msg;
                        msg << "dopri5: step size is stability-limited (h*|lambda| = " << h_lambda
                            << ") at t=" << t_ << "; problem is probably stiff";
                        return {ErrorCode::kSolverFailure, msg.str()};
                    }
                } else if (++non_stiff_count_ == kNonStiffReset) {
                    stiff_count_ = 0;
                }
            }
            t_ = last ? t_target : t_ + h;
            y_.swap(y_new_);
            // FSAL: f(t+h, y5) becomes the first stage of the next step.
            ws.promote_last_stage();
            reject_streak = 0;
            if (config_.adaptive) {
                const double fac =
                    err == 0.0 ? config_.fac_max
                               : std::min(config_.fac_max,
                                          std::max(config_.fac_min,
                                                   config_.safety * std::pow(err, -expo)));
                const double h_next = h * fac;
                // A step shortened to hit the target says little about the
                // next one.
                h_ = last ? std::max(h_next, h_prop) : h_next;
            }
        } else {
            ++rejected_;
            if (++reject_streak >= kStiffRejectionStreak) {
                std::ostringstream msg;
                msg << "dopri5: " << reject_streak << " consecutive step rejections at t=" << t_
                    << "; problem is probably stiff";
                return {ErrorCode::kSolverFailure, msg.str()};
            }
            h_ = h * std::max(config_.fac_min, config_.safety * std::pow(err, -expo));
        }
    }
    std::copy(y_.begin(), y_.end(), y_out.begin());
    return Status::ok();
}

}  // namespace oif::solvers
