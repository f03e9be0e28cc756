// SPDX-License-Identifier: Apache-2.0

#include "oif/solvers/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oif::solvers {

void Rk4::set_step(double dt) {
    if (!(dt > 0.0 && std::isfinite(dt))) {
        throw Error(ErrorCode::kInvalidArgument, "rk4: dt must be positive and finite");
    }
    dt_ = dt;
}

void Rk4::reset(double t0, std::span<const double> y0) {
    t0_ = t0;
    t_ = t0;
    k_ = 0;
    y_grid_.assign(y0.begin(), y0.end());
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &next_}) {
        v->assign(y0.size(), 0.0);
    }
    rhs_evals_ = 0;
    ready_ = true;
}

Status Rk4::advance(double t, double h, std::span<const double> y, std::span<double> out) {
    const std::size_t n = y.size();
    std::intptr_t dims[1] = {static_cast<std::intptr_t>(n)};
    OIFArrayF64 in{1, dims, nullptr};
    OIFArrayF64 res{1, dims, nullptr};
    auto eval = [&](double ts, const double* at, std::vector<double>& k) -> Status {
        in.data = const_cast<double*>(at);
        res.data = k.data();
        ++rhs_evals_;
        if (const int rc = rhs_.fn(ts, &in, &res, rhs_.user_data); rc != 0) {
            std::ostringstream msg;
            msg << "rk4: right-hand side returned " << rc << " at t=" << ts;
            return {ErrorCode::kSolverFailure, msg.str()};
        }
        return Status::ok();
    };

    Status s = eval(t, y.data(), k1_);
    if (!s.is_ok()) return s;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
    if (s = eval(t + 0.5 * h, tmp_.data(), k2_); !s.is_ok()) return s;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
    if (s = eval(t + 0.5 * h, tmp_.data(), k3_); !s.is_ok()) return s;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
    if (s = eval(t + h, tmp_.data(), k4_); !s.is_ok()) return s;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = y[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    return Status::ok();
}

Status Rk4::integrate(double t_target, std::span<double> y_out) {
    if (!ready_ || rhs_.fn == nullptr) {
        return {ErrorCode::kInvalidArgument, "rk4: initial value and RHS must be set"};
    }
    if (y_out.size() != y_grid_.size()) {
        return {ErrorCode::kInvalidArgument, "rk4: output size differs from state size"};
    }
    if (!(t_target >= t_)) {
        std::ostringstream msg;
        msg << "rk4: target time " << t_target << " precedes current time " << t_;
        return {ErrorCode::kInvalidArgument, msg.str()};
    }

    auto grid_time = [&](std::int64_t k) { return t0_ + static_cast<double>(k) * dt_; };
    while (grid_time(k_ + 1) <= t_target) {
        const double tk = grid_time(k_);
        if (Status s = advance(tk, grid_time(k_ + 1) - tk, y_grid_, next_); !s.is_ok()) {
            return s;
        }
        y_grid_.swap(next_);
        ++k_;
    }

    const double tk = grid_time(k_);
    if (tk < t_target) {
        if (Status s = advance(tk, t_target - tk, y_grid_, y_out); !s.is_ok()) {
            return s;
        }
    } else {
        std::copy(y_grid_.begin(), y_grid_.end(), y_out.begin());
    }
    t_ = t_target;
    return Status::ok();
}

}  // namespace oif::solvers
