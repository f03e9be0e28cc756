// SPDX-License-Identifier: Apache-2.0
//
// IVP adapter around the fixed-step classical Runge-Kutta engine.
// Integrators: "rk4" (default). Options: dt (float, default 1e-3).
// Tolerances are validated and recorded but do not affect the fixed step.

#include <cstring>
#include <string>

#include "adapter_support.hpp"
#include "oif/solvers/rk4.hpp"

namespace {

using oif::Status;
using oif::plugin::guarded;
using oif::plugin::invalid;

struct Session {
    oif::solvers::Rk4 engine;
    OIFCallback rhs{};
    void* user_data = nullptr;
    double reltol = 1e-6;
    double abstol = 1e-12;
    bool has_initial_value = false;
    bool integrated = false;
    std::string last_error;

    void push_rhs() { engine.set_rhs({rhs.fn, user_data}); }
};

Session* as_session(void* s) { return static_cast<Session*>(s); }

}  // namespace

OIF_PLUGIN_EXPORT int oif_ivp_create(void** session) {
    if (session == nullptr) {
        return OIF_ERR_INVALID_ARGUMENT;
    }
    auto* s = new (std::nothrow) Session;
    if (s == nullptr) {
        return OIF_ERR_ALLOCATION;
    }
    *session = s;
    return OIF_OK;
}

OIF_PLUGIN_EXPORT int oif_ivp_destroy(void* session) {
    delete as_session(session);
    return OIF_OK;
}

OIF_PLUGIN_EXPORT const char* oif_ivp_last_error(void* session) {
    return session != nullptr ? as_session(session)->last_error.c_str() : "";
}

OIF_PLUGIN_EXPORT int oif_ivp_set_initial_value(void* session, OIFArrayF64* y0, double t0) {
    Session& s = *as_session(session);
    return guarded(s.last_error, [&]() -> Status {
        if (Status st = oif::plugin::check_state_vector(y0, "y0"); !st.is_ok()) {
            return st;
        }
        if (!std::isfinite(t0)) {
            return invalid("t0 must be finite");
        }
        s.engine.reset(t0, oif::as_span(static_cast<const OIFArrayF64*>(y0)));
        s.has_initial_value = true;
        s.integrated = false;
        return Status::ok();
    });
}

OIF_PLUGIN_EXPORT int oif_ivp_set_rhs_fn(void* session, OIFCallback* rhs) {
    Session& s = *as_session(session);
    return guarded(s.last_error, [&]() -> Status {
        if (rhs == nullptr || rhs->fn == nullptr) {
            return invalid("right-hand side callback has no callable function");
        }
        s.rhs = *rhs;
        s.push_rhs();
        return Status::ok();
    });
}

OIF_PLUGIN_EXPORT int oif_ivp_set_tolerances(void* session, double reltol, double abstol) {
    Session& s = *as_session(session);
    return guarded(s.last_error, [&]() -> Status {
        if (Status st = oif::plugin::check_tolerances(reltol, abstol); !st.is_ok()) {
            return st;
        }
        if (s.integrated) {
            return invalid("tolerances can only change before integration starts");
        }
        s.reltol = reltol;
        s.abstol = abstol;
        return Status::ok();
    });
}

OIF_PLUGIN_EXPORT int oif_ivp_set_user_data(void* session, void* user_data) {
    Session& s = *as_session(session);
    s.user_data = user_data;
    s.push_rhs();
    return OIF_OK;
}

OIF_PLUGIN_EXPORT int oif_ivp_set_integrator(void* session, const char* name,
                                             OIFConfigDict* params) {
    Session& s = *as_session(session);
    return guarded(s.last_error, [&]() -> Status {
        if (name == nullptr || *name == '\0') {
            return invalid("integrator name is empty");
        }
        if (std::strcmp(name, "rk4") != 0) {
            return {oif::ErrorCode::kNotFound,
                    std::string("rk4: no integrator named '") + name + "'"};
        }
        double dt = oif::solvers::Rk4::kDefaultStep;
        const auto dict = params != nullptr ? oif::ConfigDict::decode(*params)
                                            : oif::ConfigDict{};
        for (const auto& [key, value] : dict.entries()) {
            if (key == "dt") {
                dt = oif::plugin::as_double(value);
            } else {
                oif::plugin::unknown_option(name, key);
            }
        }
        s.engine.set_step(dt);
        return Status::ok();
    });
}

OIF_PLUGIN_EXPORT int oif_ivp_integrate(void* session, double t, OIFArrayF64* y) {
    Session& s = *as_session(session);
    return guarded(s.last_error, [&]() -> Status {
        if (!s.has_initial_value) {
            return invalid("set_initial_value must be called before integrate");
        }
        if (s.rhs.fn == nullptr) {
            return invalid("set_rhs_fn must be called before integrate");
        }
        if (Status st = oif::plugin::check_state_vector(y, "y"); !st.is_ok()) {
            return st;
        }
        s.integrated = true;
        return s.engine.integrate(t, oif::as_span(y));
    });
}
