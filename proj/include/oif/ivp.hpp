// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "oif/c_abi.h"
#include "oif/marshal.hpp"
#include "oif/status.hpp"

namespace oif {

namespace ivp {

inline constexpr const char* kInterfaceName = "ivp";
inline constexpr double kDefaultRelTol = 1e-6;
inline constexpr double kDefaultAbsTol = 1e-12;

// Non-throwing routines: pack the arguments and route them through
// Dispatch. The status is whatever the implementation returned.
Status set_initial_value(ImplHandle h, OIFArrayF64* y0, double t0);
Status set_rhs_fn(ImplHandle h, OIFCallback* rhs);
Status set_tolerances(ImplHandle h, double reltol, double abstol);
Status set_user_data(ImplHandle h, void* user_data);
Status set_integrator(ImplHandle h, const char* name, OIFConfigDict* params);
Status integrate(ImplHandle h, double t, OIFArrayF64* y);

}  // namespace ivp

/// User-side RHS: writes f(t, y) into ydot and returns 0 on success.
using RhsFunction =
    std::function<int(double t, std::span<const double> y, std::span<double> ydot, void* user_data)>;

/// One initial-value problem solved by a dynamically loaded implementation.
///
/// Construction loads the implementation and destruction unloads it.
/// Every method throws oif::Error carrying the implementation's status when
/// that status is nonzero.
class IvpSession {
  public:
    explicit IvpSession(std::string_view impl_name);
    ~IvpSession();
    IvpSession(IvpSession&& other) noexcept;
    IvpSession& operator=(IvpSession&& other) noexcept;
    IvpSession(const IvpSession&) = delete;
    IvpSession& operator=(const IvpSession&) = delete;

    void set_initial_value(OIFArrayF64* y0, double t0);
    void set_initial_value(std::span<const double> y0, double t0);

    /// Native callback, handed to the implementation as is.
    void set_rhs_fn(OIFRhsFn rhs);
    /// Closure callback, invoked through a trampoline. An exception thrown by
    /// the closure aborts integrate and is rethrown from it.
    void set_rhs_fn(RhsFunction rhs);

    void set_tolerances(double reltol, double abstol);
    void set_user_data(void* user_data);
    void set_integrator(std::string_view name, const ConfigDict& params = {});

    /// y must have as many elements as y0 and is written in place.
    void integrate(double t, OIFArrayF64* y);
    void integrate(double t, std::span<double> y);

    /// Unloads now. Further calls throw Error(kNotFound).
    void close();

    ImplHandle handle() const noexcept { return handle_; }
    bool is_open() const noexcept { return handle_ >= 0; }

  private:
    struct Closure;

    void require_open() const;
    void forward_user_data();

    ImplHandle handle_ = -1;
    std::size_t state_size_ = 0;
    void* user_data_ = nullptr;
    std::unique_ptr<Closure> closure_;
    std::unique_ptr<OIFCallback> callback_;
};

}  // namespace oif
