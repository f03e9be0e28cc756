// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "oif/bridge.hpp"
#include "oif/marshal.hpp"
#include "oif/status.hpp"

namespace oif {

using BridgeFactory = std::function<std::unique_ptr<Bridge>()>;

struct DiscoverResult {
    std::vector<ImplManifest> manifests;
    /// One line per skipped file; also echoed to stderr with an `oif:` prefix.
    std::vector<std::string> diagnostics;
};

/// Reads one manifest file. Throws Error(kInvalidArgument) if malformed.
ImplManifest parse_manifest(const std::filesystem::path& file, std::string_view interface_name);

/// Splits a `:`-separated path list, dropping empty entries.
std::vector<std::filesystem::path> split_search_path(std::string_view list);

/// Process-wide registry of loaded implementations.
///
/// Implementations are found under `<root>/<interface>/<impl>/<impl>.oifm`
/// for each search root. Roots default to `OIF_IMPL_PATH`, or to the
/// directory the build installed the bundled manifests into.
class Dispatch {
  public:
    static Dispatch& instance();

    Dispatch();
    ~Dispatch();
    Dispatch(const Dispatch&) = delete;
    Dispatch& operator=(const Dispatch&) = delete;

    void set_search_roots(std::vector<std::filesystem::path> roots);
    std::vector<std::filesystem::path> search_roots() const;

    /// Manifests for `interface_name` in root order, sorted by path within
    /// each root; init_impl takes the first match, so earlier roots shadow
    /// later ones. Malformed files are skipped and reported.
    DiscoverResult discover(std::string_view interface_name) const;

    /// Version numbers are recorded but not matched.
    /// Throws Error(kNotFound) when no manifest matches and
    /// Error(kPluginFailure) when the bridge cannot load it.
    ImplHandle init_impl(std::string_view interface_name, std::string_view impl_name,
                         int version_major, int version_minor);

    /// Returns kNotFound for a handle that is not live; otherwise the
    /// bridge's status, unchanged.
    Status call_impl(ImplHandle handle, std::string_view method, const PackedArgs& in_args,
                     const PackedArgs& out_args);

    /// kNotFound for a handle that is not live. The record is removed even
    /// when the bridge reports a failure while releasing it.
    Status unload_impl(ImplHandle handle);

    /// Manifest of a live handle, or nullptr.
    std::shared_ptr<const ImplManifest> manifest(ImplHandle handle) const;

    /// Replaces the factory used for a bridge kind. Bridges already
    /// instantiated for the kind are kept.
    void register_bridge(std::string kind, BridgeFactory factory);

    /// How many times a bridge of `kind` has been constructed.
    int bridge_instantiations(std::string_view kind) const;
    std::size_t live_count() const;

  private:
    struct Record;

    Bridge& bridge_for(const std::string& kind);

    mutable std::mutex mutex_;
    std::vector<std::filesystem::path> roots_;
    std::map<std::string, BridgeFactory, std::less<>> factories_;
    std::map<std::string, std::unique_ptr<Bridge>, std::less<>> bridges_;
    std::map<std::string, int, std::less<>> instantiations_;
    std::map<ImplHandle, std::shared_ptr<Record>> table_;
    ImplHandle next_handle_ = 0;
};

}  // namespace oif
