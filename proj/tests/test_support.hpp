// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "oif/c_abi.h"

namespace oif::test {

/// Fresh, empty directory private to this test process.
inline std::filesystem::path scratch_dir(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() /
                         ("oif-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// y' = -y
inline int decay_rhs(double, OIFArrayF64* y, OIFArrayF64* ydot, void*) {
    for (intptr_t i = 0; i < y->dimensions[0]; ++i) {
        ydot->data[i] = -y->data[i];
    }
    return 0;
}

}  // namespace oif::test
