// SPDX-License-Identifier: Apache-2.0

#include "oif/ivp.hpp"

#include <utility>

#include "oif/dispatch.hpp"

namespace oif {

namespace ivp {

namespace {

Status call(ImplHandle h, std::string_view method, const PackedArgs& in) {
    static const PackedArgs kNoOutputs;
    return Dispatch::instance().call_impl(h, method, in, kNoOutputs);
}

}  // namespace

Status set_initial_value(ImplHandle h, OIFArrayF64* y0, double t0) {
    PackedArgs in;
    in.push(y0);
    in.push(&t0);
    return call(h, "set_initial_value", in);
}

Status set_rhs_fn(ImplHandle h, OIFCallback* rhs) {
    PackedArgs in;
    in.push(rhs);
    return call(h, "set_rhs_fn", in);
}

Status set_tolerances(ImplHandle h, double reltol, double abstol) {
    PackedArgs in;
    in.push(&reltol);
    in.push(&abstol);
    return call(h, "set_tolerances", in);
}

Status set_user_data(ImplHandle h, void* user_data) {
    PackedArgs in;
    in.push(UserData{user_data});
    return call(h, "set_user_data", in);
}

Status set_integrator(ImplHandle h, const char* name, OIFConfigDict* params) {
    PackedArgs in;
    in.push(name);
    in.push(params);
    return call(h, "set_integrator", in);
}

Status integrate(ImplHandle h, double t, OIFArrayF64* y) {
    PackedArgs in;
    in.push(&t);
    PackedArgs out;
    out.push(y);
    return Dispatch::instance().call_impl(h, "integrate", in, out);
}

}  // namespace ivp

struct IvpSession::Closure {
    RhsFunction fn;
    void* user_data = nullptr;
    std::exception_ptr error;

    static int trampoline(double t, OIFArrayF64* y, OIFArrayF64* ydot, void* context) {
        auto* self = static_cast<Closure*>(context);
        try {
            return self->fn(t, as_span(static_cast<const OIFArrayF64*>(y)), as_span(ydot),
                            self->user_data);
        } catch (...) {
            self->error = std::current_exception();
            return OIF_ERR_INVALID_ARGUMENT;
        }
    }
};

IvpSession::IvpSession(std::string_view impl_name)
    : handle_(Dispatch::instance().init_impl(ivp::kInterfaceName, impl_name, 1, 0)) {}

IvpSession::~IvpSession() {
    if (is_open()) {
        Dispatch::instance().unload_impl(handle_);
    }
}

IvpSession::IvpSession(IvpSession&& other) noexcept
    : handle_(std::exchange(other.handle_, -1)),
      state_size_(other.state_size_),
      user_data_(other.user_data_),
      closure_(std::move(other.closure_)),
      callback_(std::move(other.callback_)) {}

IvpSession& IvpSession::operator=(IvpSession&& other) noexcept {
    if (this != &other) {
        if (is_open()) {
            Dispatch::instance().unload_impl(handle_);
        }
        handle_ = std::exchange(other.handle_, -1);
        state_size_ = other.state_size_;
        user_data_ = other.user_data_;
        closure_ = std::move(other.closure_);
        callback_ = std::move(other.callback_);
    }
    return *this;
}

void IvpSession::require_open() const {
    if (!is_open()) {
        throw Error(ErrorCode::kNotFound, "IVP session is closed");
    }
}

void IvpSession::close() {
    if (is_open()) {
        const Status s = Dispatch::instance().unload_impl(std::exchange(handle_, -1));
        throw_if_error(s);
    }
}

void IvpSession::set_initial_value(OIFArrayF64* y0, double t0) {
    require_open();
    throw_if_error(ivp::set_initial_value(handle_, y0, t0));
    state_size_ = element_count(*y0);
}

void IvpSession::set_initial_value(std::span<const double> y0, double t0) {
    ArrayView view(std::span<double>(const_cast<double*>(y0.data()), y0.size()));
    set_initial_value(view.raw(), t0);
}

void IvpSession::set_rhs_fn(OIFRhsFn rhs) {
    require_open();
    const bool was_closure = closure_ != nullptr;
    auto cb = std::make_unique<OIFCallback>(
        OIFCallback{OIF_LANG_NATIVE, reinterpret_cast<void*>(rhs), rhs, nullptr});
    throw_if_error(ivp::set_rhs_fn(handle_, cb.get()));
    callback_ = std::move(cb);
    closure_.reset();
    if (was_closure) {
        forward_user_data();
    }
}

void IvpSession::set_rhs_fn(RhsFunction rhs) {
    require_open();
    auto closure = std::make_unique<Closure>();
    closure->fn = std::move(rhs);
    closure->user_data = user_data_;
    auto cb = std::make_unique<OIFCallback>(
        OIFCallback{OIF_LANG_NATIVE, &closure->fn, &Closure::trampoline, closure.get()});
    throw_if_error(ivp::set_rhs_fn(handle_, cb.get()));
    callback_ = std::move(cb);
    closure_ = std::move(closure);
    forward_user_data();
}

void IvpSession::set_tolerances(double reltol, double abstol) {
    require_open();
    throw_if_error(ivp::set_tolerances(handle_, reltol, abstol));
}

void IvpSession::set_user_data(void* user_data) {
    require_open();
    user_data_ = user_data;
    if (closure_) {
        closure_->user_data = user_data;
    }
    forward_user_data();
}

void IvpSession::forward_user_data() {
    // A closure needs its own context; the user's address travels inside it.
    void* address = closure_ ? static_cast<void*>(closure_.get()) : user_data_;
    throw_if_error(ivp::set_user_data(handle_, address));
}

void IvpSession::set_integrator(std::string_view name, const ConfigDict& params) {
    require_open();
    const std::string name_z(name);
    EncodedConfigDict encoded(params);
    throw_if_error(ivp::set_integrator(handle_, name_z.c_str(), encoded.raw()));
}

void IvpSession::integrate(double t, OIFArrayF64* y) {
    require_open();
    if (state_size_ != 0 && element_count(*y) != state_size_) {
        throw Error(ErrorCode::kInvalidArgument,
                    "output array has " + std::to_string(element_count(*y)) +
                        " elements, state has " + std::to_string(state_size_));
    }
    const Status s = ivp::integrate(handle_, t, y);
    if (closure_ && closure_->error) {
        std::rethrow_exception(std::exchange(closure_->error, nullptr));
    }
    throw_if_error(s);
}

void IvpSession::integrate(double t, std::span<double> y) {
    ArrayView view(y);
    integrate(t, view.raw());
}

}  // namespace oif
