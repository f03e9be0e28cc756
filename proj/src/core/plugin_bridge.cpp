// SPDX-License-Identifier: Apache-2.0

#include "oif/plugin_bridge.hpp"

#include <dlfcn.h>

#include <array>
#include <sstream>
#include <utility>

namespace oif {

namespace fs = std::filesystem;

// SharedLibrary --------------------------------------------------------------

SharedLibrary::SharedLibrary(const fs::path& path) : path_(path) {
    handle_ = ::dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
    if (handle_ == nullptr) {
        const char* why = ::dlerror();
        throw Error(ErrorCode::kPluginFailure, "cannot load " + path.string() + ": " +
                                                   (why != nullptr ? why : "unknown error"));
    }
}

SharedLibrary::SharedLibrary(SharedLibrary&& other) noexcept
    : handle_(std::exchange(other.handle_, nullptr)), path_(std::move(other.path_)) {}

SharedLibrary& SharedLibrary::operator=(SharedLibrary&& other) noexcept {
    if (this != &other) {
        close();
        handle_ = std::exchange(other.handle_, nullptr);
        path_ = std::move(other.path_);
    }
    return *this;
}

SharedLibrary::~SharedLibrary() { close(); }

void* SharedLibrary::symbol(const std::string& name) const noexcept {
    if (handle_ == nullptr) {
        return nullptr;
    }
    return ::dlsym(handle_, name.c_str());
}

bool SharedLibrary::close() noexcept {
    if (handle_ == nullptr) {
        return true;
    }
    const int rc = ::dlclose(std::exchange(handle_, nullptr));
    return rc == 0;
}

// Signatures -----------------------------------------------------------------

namespace {

template <TypeTag Tag>
struct Native;
template <>
struct Native<TypeTag::kInt> {
    using type = std::int32_t;
    static type from(void* p) { return *static_cast<std::int32_t*>(p); }
};
template <>
struct Native<TypeTag::kFloat64> {
    using type = double;
    static type from(void* p) { return *static_cast<double*>(p); }
};
template <>
struct Native<TypeTag::kArrayF64> {
    using type = OIFArrayF64*;
    static type from(void* p) { return static_cast<OIFArrayF64*>(p); }
};
template <>
struct Native<TypeTag::kStr> {
    using type = const char*;
    static type from(void* p) { return static_cast<const char*>(p); }
};
template <>
struct Native<TypeTag::kCallback> {
    using type = OIFCallback*;
    static type from(void* p) { return static_cast<OIFCallback*>(p); }
};
template <>
struct Native<TypeTag::kUserData> {
    using type = void*;
    static type from(void* p) { return p; }
};
template <>
struct Native<TypeTag::kConfigDict> {
    using type = OIFConfigDict*;
    static type from(void* p) { return static_cast<OIFConfigDict*>(p); }
};

template <TypeTag... Tags, std::size_t... I>
std::int32_t invoke_impl(void* fn, void* session, std::span<void* const> args,
                         std::index_sequence<I...>) {
    using Fn = int (*)(void*, typename Native<Tags>::type...);
    return reinterpret_cast<Fn>(fn)(session, Native<Tags>::from(args[I])...);
}

template <TypeTag... Tags>
std::int32_t invoke(void* fn, void* session, std::span<void* const> args) {
    return invoke_impl<Tags...>(fn, session, args, std::index_sequence_for<decltype(Tags)...>{});
}

template <TypeTag... Tags>
MethodSignature signature() {
    return {{Tags...}, &invoke<Tags...>};
}

const InterfaceMethods& ivp_methods() {
    using T = TypeTag;
    static const InterfaceMethods methods{
        {"set_initial_value", signature<T::kArrayF64, T::kFloat64>()},
        {"set_rhs_fn", signature<T::kCallback>()},
        {"set_tolerances", signature<T::kFloat64, T::kFloat64>()},
        {"set_user_data", signature<T::kUserData>()},
        {"set_integrator", signature<T::kStr, T::kConfigDict>()},
        {"integrate", signature<T::kFloat64, T::kArrayF64>()},
    };
    return methods;
}

std::string join_tags(std::span<const TypeTag> tags) {
    std::string s;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i != 0) s += ", ";
        s += type_tag_name(tags[i]);
    }
    return s;
}

Status with_plugin_message(PluginState& ps, std::int32_t code, std::string_view method) {
    std::string message = ps.prefix + "_" + std::string(method) + " returned " +
                          std::to_string(code) + " (" + error_code_name(code) + ")";
    using LastError = const char* (*)(void*);
    auto it = ps.resolved.find("last_error");
    if (it == ps.resolved.end()) {
        it = ps.resolved.emplace("last_error", ps.library.symbol(ps.prefix + "_last_error")).first;
    }
    if (it->second != nullptr) {
        if (const char* text = reinterpret_cast<LastError>(it->second)(ps.session);
            text != nullptr && *text != '\0') {
            message = text;
        }
    }
    return {code, std::move(message)};
}

}  // namespace

const InterfaceMethods* interface_methods(std::string_view interface_name) {
    if (interface_name == "ivp") {
        return &ivp_methods();
    }
    return nullptr;
}

// PluginBridge ---------------------------------------------------------------

std::unique_ptr<ImplState> PluginBridge::load(const ImplManifest& manifest) {
    if (manifest.details.size() != 2) {
        throw Error(ErrorCode::kPluginFailure,
                    "plugin manifest for '" + manifest.impl_name +
                        "' must list a library path and a symbol prefix");
    }
    const InterfaceMethods* methods = interface_methods(manifest.interface_name);
    if (methods == nullptr) {
        throw Error(ErrorCode::kPluginFailure,
                    "unknown interface '" + manifest.interface_name + "'");
    }

    fs::path lib_path = manifest.details[0];
    if (lib_path.is_relative()) {
        lib_path = manifest.directory / lib_path;
    }
    auto state = std::make_unique<PluginState>(SharedLibrary(lib_path), manifest.details[1],
                                               methods);

    const std::string create_name = state->prefix + "_create";
    const std::string destroy_name = state->prefix + "_destroy";
    void* create = state->library.symbol(create_name);
    if (create == nullptr) {
        throw Error(ErrorCode::kPluginFailure, "missing symbol " + create_name + " in " +
                                                   lib_path.string());
    }
    if (state->library.symbol(destroy_name) == nullptr) {
        throw Error(ErrorCode::kPluginFailure, "missing symbol " + destroy_name + " in " +
                                                   lib_path.string());
    }
    using CreateFn = int (*)(void**);
    if (const int rc = reinterpret_cast<CreateFn>(create)(&state->session); rc != 0) {
        throw Error(ErrorCode::kPluginFailure,
                    create_name + " returned " + std::to_string(rc));
    }
    return state;
}

Status PluginBridge::call(ImplState& base, std::string_view method, const PackedArgs& in_args,
                          const PackedArgs& out_args) {
    auto& ps = static_cast<PluginState&>(base);
    if (ps.released) {
        return {ErrorCode::kNotFound, "implementation already unloaded"};
    }
    const auto sig = ps.methods->find(method);
    if (sig == ps.methods->end()) {
        return {ErrorCode::kPluginFailure,
                "symbol " + ps.prefix + "_" + std::string(method) +
                    " not resolved: not a method of this interface"};
    }

    auto fn_it = ps.resolved.find(method);
    if (fn_it == ps.resolved.end()) {
        const std::string name = ps.prefix + "_" + std::string(method);
        fn_it = ps.resolved.emplace(std::string(method), ps.library.symbol(name)).first;
    }
    if (fn_it->second == nullptr) {
        return {ErrorCode::kPluginFailure,
                "symbol " + ps.prefix + "_" + std::string(method) + " not resolved in " +
                    ps.library.path().string()};
    }

    const auto& expected = sig->second.tags;
    const std::size_t n_args = in_args.count() + out_args.count();
    if (n_args != expected.size()) {
        return {ErrorCode::kTypeMismatch, std::string(method) + " takes " +
                                              std::to_string(expected.size()) +
                                              " arguments, got " + std::to_string(n_args)};
    }
    std::array<void*, 8> payloads{};
    for (std::size_t i = 0; i < n_args; ++i) {
        const bool from_in = i < in_args.count();
        const std::size_t j = from_in ? i : i - in_args.count();
        const TypeTag tag = from_in ? in_args.tags()[j] : out_args.tags()[j];
        if (tag != expected[i]) {
            std::ostringstream msg;
            msg << method << " argument " << i << ": expected " << type_tag_name(expected[i])
                << ", got " << type_tag_name(tag) << " (signature: " << join_tags(expected)
                << ")";
            return {ErrorCode::kTypeMismatch, msg.str()};
        }
        payloads[i] = from_in ? in_args.payloads()[j] : out_args.payloads()[j];
    }

    const std::int32_t rc = sig->second.invoke(fn_it->second, ps.session,
                                               std::span<void* const>(payloads.data(), n_args));
    if (rc == 0) {
        return Status::ok();
    }
    return with_plugin_message(ps, rc, method);
}

Status PluginBridge::unload(ImplState& base) {
    auto& ps = static_cast<PluginState&>(base);
    if (ps.released) {
        return {ErrorCode::kNotFound, "implementation already unloaded"};
    }
    ps.released = true;
    using DestroyFn = int (*)(void*);
    const std::string destroy_name = ps.prefix + "_destroy";
    auto destroy = reinterpret_cast<DestroyFn>(ps.library.symbol(destroy_name));
    const int rc = destroy != nullptr ? destroy(std::exchange(ps.session, nullptr)) : -1;
    ps.resolved.clear();
    const bool closed = ps.library.close();
    if (rc != 0) {
        return {ErrorCode::kPluginFailure, destroy_name + " returned " + std::to_string(rc)};
    }
    if (!closed) {
        return {ErrorCode::kPluginFailure, "cannot close " + ps.library.path().string()};
    }
    return Status::ok();
}

}  // namespace oif
