// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <new>
#include <string>
#include <string_view>

#include "oif/c_abi.h"
#include "oif/marshal.hpp"
#include "oif/status.hpp"

#define OIF_PLUGIN_EXPORT extern "C" __attribute__((visibility("default")))

namespace oif::plugin {

/// Runs `f` (returning Status) and turns failures into a status code,
/// keeping the message for `<prefix>_last_error`.
template <typename F>
int guarded(std::string& last_error, F&& f) noexcept {
    try {
        const Status s = f();
        if (!s.is_ok()) {
            last_error = s.message();
        }
        return s.code();
    } catch (const Error& e) {
        last_error = e.what();
        return e.code();
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return OIF_ERR_ALLOCATION;
    } catch (const std::exception& e) {
        last_error = e.what();
        return OIF_ERR_INVALID_ARGUMENT;
    }
}

inline Status invalid(std::string message) {
    return {ErrorCode::kInvalidArgument, std::move(message)};
}

/// IVP state must be a non-empty vector.
inline Status check_state_vector(const OIFArrayF64* a, std::string_view what) {
    if (a == nullptr) {
        return invalid(std::string(what) + " is null");
    }
    if (a->nd != 1) {
        return invalid(std::string(what) + " must be 1-dimensional, got nd=" +
                       std::to_string(a->nd));
    }
    if (a->dimensions[0] < 1) {
        return invalid(std::string(what) + " must have at least one element");
    }
    return Status::ok();
}

inline Status check_tolerances(double reltol, double abstol) {
    if (!(reltol > 0.0) || !std::isfinite(reltol)) {
        return invalid("reltol must be positive, got " + std::to_string(reltol));
    }
    if (!(abstol >= 0.0) || !std::isfinite(abstol)) {
        return invalid("abstol must be non-negative, got " + std::to_string(abstol));
    }
    return Status::ok();
}

/// Floating option; integer values are widened.
inline double as_double(const ConfigDict::Value& v) {
    if (const auto* i = std::get_if<std::int32_t>(&v)) {
        return static_cast<double>(*i);
    }
    return std::get<double>(v);
}

[[noreturn]] inline void unknown_option(std::string_view integrator, std::string_view key) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown option '" + std::string(key) + "' for integrator '" +
                    std::string(integrator) + "'");
}

}  // namespace oif::plugin
