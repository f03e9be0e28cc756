// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "oif/marshal.hpp"
#include "oif/status.hpp"

namespace oif {

/// Parsed `<impl>.oifm` manifest.
struct ImplManifest {
    std::string interface_name;
    std::string impl_name;
    std::string bridge_kind;
    int version_major = 0;
    int version_minor = 0;
    /// Everything after the version line, opaque to dispatch.
    std::vector<std::string> details;
    /// Directory holding the manifest; relative details resolve against it.
    std::filesystem::path directory;
};

/// Per-implementation state owned by a bridge.
class ImplState {
  public:
    virtual ~ImplState() = default;
};

/// Loads implementations of one technology and forwards calls to them.
/// load/unload are serialized by the caller. call on one state must be
/// externally serialized; distinct states are independent.
class Bridge {
  public:
    virtual ~Bridge() = default;

    /// Throws Error on failure.
    virtual std::unique_ptr<ImplState> load(const ImplManifest& manifest) = 0;

    virtual Status call(ImplState& state, std::string_view method, const PackedArgs& in_args,
                        const PackedArgs& out_args) = 0;

    /// The state is released whatever the returned status.
    virtual Status unload(ImplState& state) = 0;
};

}  // namespace oif
