// SPDX-License-Identifier: Apache-2.0

#include "oif/dispatch.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oif/plugin_bridge.hpp"

#ifndef OIF_DEFAULT_IMPL_PATH
#define OIF_DEFAULT_IMPL_PATH ""
#endif

namespace oif {

namespace fs = std::filesystem;

struct Dispatch::Record {
    ImplHandle handle;
    std::shared_ptr<const ImplManifest> manifest;
    Bridge* bridge;
    std::unique_ptr<ImplState> state;
};

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_manifest(const fs::path& file, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "malformed manifest " + file.string() + ": " + why);
}

void diagnose(const std::string& line) { std::cerr << "oif: " << line << '\n'; }

}  // namespace

ImplManifest parse_manifest(const fs::path& file, std::string_view interface_name) {
    std::ifstream in(file);
    if (!in) {
        bad_manifest(file, "cannot open");
    }
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        lines.emplace_back(t);
    }
    if (lines.size() < 2) {
        bad_manifest(file, "expected a bridge kind line and a version line");
    }

    ImplManifest m;
    m.interface_name = std::string(interface_name);
    m.impl_name = file.stem().string();
    m.bridge_kind = lines[0];
    if (m.bridge_kind.find_first_of(" \t") != std::string::npos) {
        bad_manifest(file, "bridge kind must be a single word");
    }

    std::istringstream version(lines[1]);
    std::string word;
    std::string rest;
    if (!(version >> word >> m.version_major >> m.version_minor) || word != "version" ||
        (version >> rest)) {
        bad_manifest(file, "second line must read 'version <major> <minor>'");
    }
    m.details.assign(lines.begin() + 2, lines.end());
    m.directory = file.parent_path();
    return m;
}

std::vector<fs::path> split_search_path(std::string_view list) {
    std::vector<fs::path> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(':', start);
        if (end == std::string_view::npos) {
            end = list.size();
        }
        if (end > start) {
            out.emplace_back(std::string(list.substr(start, end - start)));
        }
        start = end + 1;
    }
    return out;
}

Dispatch& Dispatch::instance() {
    static Dispatch dispatch;
    return dispatch;
}

Dispatch::Dispatch() {
    if (const char* env = std::getenv("OIF_IMPL_PATH"); env != nullptr && *env != '\0') {
        roots_ = split_search_path(env);
    } else {
        roots_ = split_search_path(OIF_DEFAULT_IMPL_PATH);
    }
    factories_["plugin"] = [] { return std::make_unique<PluginBridge>(); };
}

Dispatch::~Dispatch() {
    // Release whatever the user forgot to unload before bridges go away.
    for (auto& [handle, record] : table_) {
        record->bridge->unload(*record->state);
        record->state.reset();
    }
    table_.clear();
}

void Dispatch::set_search_roots(std::vector<fs::path> roots) {
    std::lock_guard lock(mutex_);
    roots_ = std::move(roots);
}

std::vector<fs::path> Dispatch::search_roots() const {
    std::lock_guard lock(mutex_);
    return roots_;
}

DiscoverResult Dispatch::discover(std::string_view interface_name) const {
    const auto roots = search_roots();
    std::vector<fs::path> files;
    for (const auto& root : roots) {
        const fs::path dir = root / std::string(interface_name);
        std::error_code ec;
        if (!fs::is_directory(dir, ec)) {
            continue;
        }
        const auto first = files.size();
        for (const auto& impl_dir : fs::directory_iterator(dir, ec)) {
            if (!impl_dir.is_directory()) {
                continue;
            }
            for (const auto& entry : fs::directory_iterator(impl_dir.path(), ec)) {
                if (entry.is_regular_file() && entry.path().extension() == ".oifm") {
                    files.push_back(entry.path());
                }
            }
        }
        std::sort(files.begin() + static_cast<std::ptrdiff_t>(first), files.end());
    }

    DiscoverResult result;
    for (const auto& file : files) {
        try {
            result.manifests.push_back(parse_manifest(file, interface_name));
        } catch (const Error& e) {
            result.diagnostics.emplace_back(e.what());
            diagnose(e.what());
        }
    }
    return result;
}

Bridge& Dispatch::bridge_for(const std::string& kind) {
    if (auto it = bridges_.find(kind); it != bridges_.end()) {
        return *it->second;
    }
    auto factory = factories_.find(kind);
    if (factory == factories_.end()) {
        throw Error(ErrorCode::kPluginFailure, "no bridge for kind '" + kind + "'");
    }
    auto bridge = factory->second();
    ++instantiations_[kind];
    return *bridges_.emplace(kind, std::move(bridge)).first->second;
}

ImplHandle Dispatch::init_impl(std::string_view interface_name, std::string_view impl_name,
                               int version_major, int version_minor) {
    const auto found = discover(interface_name);
    const auto it = std::find_if(found.manifests.begin(), found.manifests.end(),
                                 [&](const ImplManifest& m) { return m.impl_name == impl_name; });
    if (it == found.manifests.end()) {
        throw Error(ErrorCode::kNotFound, "no implementation '" + std::string(impl_name) +
                                              "' of interface '" + std::string(interface_name) +
                                              "'");
    }

    auto manifest = std::make_shared<ImplManifest>(*it);
    // Recorded for a future compatibility check; not matched today.
    manifest->version_major = version_major;
    manifest->version_minor = version_minor;

    std::lock_guard lock(mutex_);
    Bridge& bridge = bridge_for(manifest->bridge_kind);
    auto state = bridge.load(*manifest);

    auto record = std::make_shared<Record>();
    record->handle = next_handle_++;
    record->manifest = std::move(manifest);
    record->bridge = &bridge;
    record->state = std::move(state);
    table_.emplace(record->handle, record);
    return record->handle;
}

Status Dispatch::call_impl(ImplHandle handle, std::string_view method, const PackedArgs& in_args,
                           const PackedArgs& out_args) {
    std::shared_ptr<Record> record;
    {
        std::lock_guard lock(mutex_);
        auto it = table_.find(handle);
        if (it == table_.end()) {
            return {ErrorCode::kNotFound, "no live implementation with handle " +
                                              std::to_string(handle)};
        }
        record = it->second;
    }
    return record->bridge->call(*record->state, method, in_args, out_args);
}

Status Dispatch::unload_impl(ImplHandle handle) {
    std::shared_ptr<Record> record;
    {
        std::lock_guard lock(mutex_);
        auto it = table_.find(handle);
        if (it == table_.end()) {
            return {ErrorCode::kNotFound, "no live implementation with handle " +
                                              std::to_string(handle)};
        }
        record = std::move(it->second);
        table_.erase(it);
        Status s = record->bridge->unload(*record->state);
        record->state.reset();
        return s;
    }
}

std::shared_ptr<const ImplManifest> Dispatch::manifest(ImplHandle handle) const {
    std::lock_guard lock(mutex_);
    auto it = table_.find(handle);
    return it == table_.end() ? nullptr : it->second->manifest;
}

void Dispatch::register_bridge(std::string kind, BridgeFactory factory) {
    std::lock_guard lock(mutex_);
    factories_[std::move(kind)] = std::move(factory);
}

int Dispatch::bridge_instantiations(std::string_view kind) const {
    std::lock_guard lock(mutex_);
    auto it = instantiations_.find(kind);
    return it == instantiations_.end() ? 0 : it->second;
}

std::size_t Dispatch::live_count() const {
    std::lock_guard lock(mutex_);
    return table_.size();
}

}  // namespace oif
