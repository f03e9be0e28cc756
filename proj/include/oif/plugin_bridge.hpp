// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oif/bridge.hpp"

namespace oif {

/// Owning handle to a dlopen'ed library. Closed exactly once.
class SharedLibrary {
  public:
    /// Throws Error(kPluginFailure) with the loader's message.
    explicit SharedLibrary(const std::filesystem::path& path);
    SharedLibrary(SharedLibrary&& other) noexcept;
    SharedLibrary& operator=(SharedLibrary&& other) noexcept;
    SharedLibrary(const SharedLibrary&) = delete;
    SharedLibrary& operator=(const SharedLibrary&) = delete;
    ~SharedLibrary();

    /// nullptr if the symbol is not exported.
    void* symbol(const std::string& name) const noexcept;
    bool is_open() const noexcept { return handle_ != nullptr; }
    /// Returns false if the loader reported an error. Idempotent.
    bool close() noexcept;
    const std::filesystem::path& path() const noexcept { return path_; }

  private:
    void* handle_ = nullptr;
    std::filesystem::path path_;
};

/// Calls `fn(session, args...)` after casting fn to the method's native
/// signature.
using Invoker = std::int32_t (*)(void* fn, void* session, std::span<void* const> args);

struct MethodSignature {
    std::vector<TypeTag> tags;
    Invoker invoke;
};

using InterfaceMethods = std::map<std::string, MethodSignature, std::less<>>;

/// Fixed entry-point signatures for an interface, or nullptr if unknown.
const InterfaceMethods* interface_methods(std::string_view interface_name);

class PluginState final : public ImplState {
  public:
    PluginState(SharedLibrary library, std::string prefix, const InterfaceMethods* methods)
        : library(std::move(library)), prefix(std::move(prefix)), methods(methods) {}

    SharedLibrary library;
    std::string prefix;
    const InterfaceMethods* methods;
    void* session = nullptr;
    std::map<std::string, void*, std::less<>> resolved;
    bool released = false;
};

/// Bridge for natively compiled adapters.
///
/// Manifest details are `[library path, symbol prefix]`; a relative path is
/// resolved against the manifest's directory. The library must export
/// `<prefix>_create(void**)`, `<prefix>_destroy(void*)` and one
/// `<prefix>_<method>` per interface method, each taking the session
/// address first. `<prefix>_last_error(void*)` is optional and supplies the
/// message attached to a nonzero status.
class PluginBridge final : public Bridge {
  public:
    std::unique_ptr<ImplState> load(const ImplManifest& manifest) override;
    Status call(ImplState& state, std::string_view method, const PackedArgs& in_args,
                const PackedArgs& out_args) override;
    Status unload(ImplState& state) override;
};

}  // namespace oif
