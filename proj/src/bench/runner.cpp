// SPDX-License-Identifier: Apache-2.0

#include "oif/bench/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "oif/bench/problems.hpp"
#include "oif/ivp.hpp"
#include "oif/solvers/dopri5.hpp"
#include "oif/solvers/rk4.hpp"

namespace oif::bench {

const char* to_string(CallPath path) noexcept {
    return path == CallPath::kOif ? "oif" : "raw";
}

namespace {

using Clock = std::chrono::steady_clock;

/// One way of reaching a solver. Setup is untimed; integrate is the timed
/// work.
class Driver {
  public:
    virtual ~Driver() = default;
    virtual void configure(OIFRhsFn rhs, void* context, const CaseSpec& spec) = 0;
    virtual void restart(double t0, std::span<const double> y0) = 0;
    virtual Status integrate(double t, std::span<double> y) = 0;
};

class OifDriver final : public Driver {
  public:
    explicit OifDriver(const std::string& impl) : session_(impl) {}

    void configure(OIFRhsFn rhs, void* context, const CaseSpec& spec) override {
        if (!spec.integrator.empty()) {
            session_.set_integrator(spec.integrator, spec.integrator_params);
        }
        session_.set_rhs_fn(rhs);
        session_.set_user_data(context);
        reltol_ = spec.reltol;
        abstol_ = spec.abstol;
    }

    void restart(double t0, std::span<const double> y0) override {
        session_.set_initial_value(y0, t0);
        session_.set_tolerances(reltol_, abstol_);
    }

    Status integrate(double t, std::span<double> y) override {
        try {
            session_.integrate(t, y);
            return Status::ok();
        } catch (const Error& e) {
            return e.status();
        }
    }

  private:
    IvpSession session_;
    double reltol_ = ivp::kDefaultRelTol;
    double abstol_ = ivp::kDefaultAbsTol;
};

class RawDopri5Driver final : public Driver {
  public:
    void configure(OIFRhsFn rhs, void* context, const CaseSpec& spec) override {
        if (!spec.integrator.empty() && spec.integrator != "dopri5") {
            throw Error(ErrorCode::kNotFound, "dopri5c: no integrator named '" +
                                                  spec.integrator + "'");
        }
        solvers::Dopri5Config base;
        base.reltol = spec.reltol;
        base.abstol = spec.abstol;
        engine_.set_config(solvers::with_options(base, spec.integrator_params));
        engine_.set_rhs({rhs, context});
    }

    void restart(double t0, std::span<const double> y0) override { engine_.reset(t0, y0); }

    Status integrate(double t, std::span<double> y) override { return engine_.integrate(t, y); }

  private:
    solvers::Dopri5 engine_;
};

class RawRk4Driver final : public Driver {
  public:
    void configure(OIFRhsFn rhs, void* context, const CaseSpec& spec) override {
        if (!spec.integrator.empty() && spec.integrator != "rk4") {
            throw Error(ErrorCode::kNotFound, "rk4: no integrator named '" + spec.integrator +
                                                  "'");
        }
        for (const auto& [key, value] : spec.integrator_params.entries()) {
            if (key != "dt") {
                throw Error(ErrorCode::kInvalidArgument, "rk4: unknown option '" + key + "'");
            }
            const auto* i = std::get_if<std::int32_t>(&value);
            engine_.set_step(i != nullptr ? static_cast<double>(*i) : std::get<double>(value));
        }
        engine_.set_rhs({rhs, context});
    }

    void restart(double t0, std::span<const double> y0) override { engine_.reset(t0, y0); }

    Status integrate(double t, std::span<double> y) override { return engine_.integrate(t, y); }

  private:
    solvers::Rk4 engine_;
};

std::unique_ptr<Driver> make_driver(const CaseSpec& spec) {
    if (spec.path == CallPath::kOif) {
        return std::make_unique<OifDriver>(spec.impl);
    }
    if (spec.impl == "dopri5c") {
        return std::make_unique<RawDopri5Driver>();
    }
    if (spec.impl == "rk4") {
        return std::make_unique<RawRk4Driver>();
    }
    throw Error(ErrorCode::kNotFound,
                "no statically linked implementation '" + spec.impl + "' for the raw path");
}

Status integrate_loop(Driver& driver, double t0, double t_final, int n_out,
                      std::span<double> y) {
    for (int i = 1; i <= n_out; ++i) {
        const double t = i == n_out ? t_final
                                    : t0 + (t_final - t0) * static_cast<double>(i) /
                                               static_cast<double>(n_out);
        if (Status s = driver.integrate(t, y); !s.is_ok()) {
            return s;
        }
    }
    return Status::ok();
}

}  // namespace

CaseResult run_case(const CaseSpec& spec) {
    CaseResult result;
    if (spec.repeats < 1 || spec.n_out < 1) {
        result.status = {ErrorCode::kInvalidArgument, "repeats and n_out must be positive"};
        return result;
    }

    std::optional<BurgersContext> burgers_ctx;
    std::optional<VdpContext> vdp_ctx;
    OIFRhsFn rhs = nullptr;
    void* context = nullptr;
    double t0 = 0.0;
    if (spec.problem == ProblemKind::kBurgers) {
        if (spec.n < 2) {
            result.status = {ErrorCode::kInvalidArgument, "Burgers needs at least two cells"};
            return result;
        }
        const BurgersProblem p(spec.n, spec.t_final);
        burgers_ctx = BurgersContext{p.dx};
        result.initial_state = p.initial_state();
        rhs = &burgers_rhs;
        context = &*burgers_ctx;
        t0 = p.t0;
    } else {
        const VdpProblem p{spec.mu, 0.0, spec.t_final};
        vdp_ctx = VdpContext{p.mu};
        result.initial_state = p.initial_state();
        rhs = &vdp_rhs;
        context = &*vdp_ctx;
        t0 = p.t0;
    }

    try {
        auto driver = make_driver(spec);
        driver->configure(rhs, context, spec);
        std::vector<double> y(result.initial_state.size());

        const int total = spec.repeats + (spec.warmup ? 1 : 0);
        for (int run = 0; run < total; ++run) {
            driver->restart(t0, result.initial_state);
            const auto start = Clock::now();
            const Status s = integrate_loop(*driver, t0, spec.t_final, spec.n_out, y);
            const auto stop = Clock::now();
            if (!s.is_ok()) {
                result.status = s;
                result.sample.runs.clear();
                return result;
            }
            if (!(spec.warmup && run == 0)) {
                result.sample.runs.push_back(std::chrono::duration<double>(stop - start).count());
            }
        }
        result.final_state = std::move(y);
    } catch (const Error& e) {
        result.status = e.status();
        result.sample.runs.clear();
    }
    return result;
}

RuntimeSample rhs_micro(std::size_t n, int evals, int repeats) {
    const BurgersProblem p(n);
    BurgersContext ctx{p.dx};
    std::vector<double> u = p.initial_state();
    std::vector<double> udot(n);
    std::intptr_t dims[1] = {static_cast<std::intptr_t>(n)};
    OIFArrayF64 u_arr{1, dims, u.data()};
    OIFArrayF64 udot_arr{1, dims, udot.data()};

    RuntimeSample sample;
    for (int r = 0; r < repeats; ++r) {
        const auto start = Clock::now();
        for (int k = 0; k < evals; ++k) {
            burgers_rhs(0.0, &u_arr, &udot_arr, &ctx);
        }
        const auto stop = Clock::now();
        sample.runs.push_back(std::chrono::duration<double>(stop - start).count());
    }
    return sample;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_header() { return "case,path,impl,param,mean_s,ci95_s,status"; }

std::string csv_row(const std::string& case_id, const std::string& path, const std::string& impl,
                    const std::string& param, const RuntimeSample& sample, const Status& status) {
    auto num = [](double v) {
        if (std::isnan(v)) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    std::string mean;
    std::string ci;
    std::string state = "ok";
    if (status.is_ok()) {
        const auto s = sample.summary();
        mean = num(s.mean);
        ci = num(s.ci95);
    } else {
        state = "error " + std::to_string(status.code()) + ": " + status.message();
    }
    return csv_escape(case_id) + "," + csv_escape(path) + "," + csv_escape(impl) + "," +
           csv_escape(param) + "," + mean + "," + ci + "," + csv_escape(state);
}

void write_solution(const std::filesystem::path& file, std::span<const double> values) {
    std::ofstream out(file);
    if (!out) {
        throw Error(ErrorCode::kInvalidArgument, "cannot write " + file.string());
    }
    out << "i,value\n";
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << i << ',' << buf << '\n';
    }
}

}  // namespace oif::bench
