// SPDX-License-Identifier: Apache-2.0

#include "oif/c_api.h"

#include <algorithm>
#include <new>
#include <string>
#include <type_traits>
#include <vector>

#include "oif/dispatch.hpp"
#include "oif/ivp.hpp"
#include "oif/marshal.hpp"

namespace {

thread_local std::string g_last_error;

int record(const oif::Status& s) {
    if (!s.is_ok()) {
        g_last_error = s.message();
    }
    return s.code();
}

template <typename F>
int guarded(F&& f) {
    try {
        return record(f());
    } catch (const oif::Error& e) {
        g_last_error = e.what();
        return e.code();
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return OIF_ERR_ALLOCATION;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OIF_ERR_INVALID_ARGUMENT;
    }
}

// Records handed out through the C API. The public record is the first
// member, so the record pointer is also the allocation.
struct OwnedArray {
    OIFArrayF64 record;
    intptr_t* dims;
    double* data;  // null for views
};

struct OwnedDict {
    OIFConfigDict record;
    oif::ConfigDict* dict;
    std::vector<std::uint8_t>* bytes;
};

OwnedArray* new_array(intptr_t nd, const intptr_t* dimensions, bool allocate_data) {
    std::size_t n = 1;
    for (intptr_t i = 0; i < nd; ++i) {
        if (dimensions[i] < 0) {
            throw oif::Error(oif::ErrorCode::kInvalidArgument,
                             "negative extent in dimension " + std::to_string(i));
        }
        n *= static_cast<std::size_t>(dimensions[i]);
    }
    auto* owned = new OwnedArray{{nd, nullptr, nullptr}, new intptr_t[nd], nullptr};
    std::copy(dimensions, dimensions + nd, owned->dims);
    if (allocate_data) {
        try {
            owned->data = new double[n == 0 ? 1 : n]();
        } catch (...) {
            delete[] owned->dims;
            delete owned;
            throw;
        }
    }
    owned->record.dimensions = owned->dims;
    owned->record.data = owned->data;
    return owned;
}

static_assert(std::is_standard_layout_v<OwnedArray>);
static_assert(std::is_standard_layout_v<OwnedDict>);

}  // namespace

extern "C" {

ImplHandle oif_init_impl(const char* interface_name, const char* impl_name, int version_major,
                         int version_minor) {
    if (interface_name == nullptr || impl_name == nullptr) {
        g_last_error = "null interface or implementation name";
        return OIF_ERR_INVALID_ARGUMENT;
    }
    ImplHandle handle = -1;
    const int rc = guarded([&] {
        handle = oif::Dispatch::instance().init_impl(interface_name, impl_name, version_major,
                                                     version_minor);
        return oif::Status::ok();
    });
    return rc == OIF_OK ? handle : rc;
}

int oif_unload_impl(ImplHandle implh) {
    return guarded([&] { return oif::Dispatch::instance().unload_impl(implh); });
}

int oif_call_impl(ImplHandle implh, const char* method, const OIFArgs* in_args,
                  const OIFArgs* out_args) {
    if (method == nullptr) {
        g_last_error = "null method name";
        return OIF_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const auto in = in_args ? oif::PackedArgs::from_raw(*in_args) : oif::PackedArgs{};
        const auto out = out_args ? oif::PackedArgs::from_raw(*out_args) : oif::PackedArgs{};
        return oif::Dispatch::instance().call_impl(implh, method, in, out);
    });
}

const char* oif_last_error(void) { return g_last_error.c_str(); }

OIFArrayF64* oif_create_array_f64(intptr_t nd, const intptr_t* dimensions) {
    if (nd < 1 || dimensions == nullptr) {
        g_last_error = "array must have at least one dimension";
        return nullptr;
    }
    try {
        return &new_array(nd, dimensions, true)->record;
    } catch (const std::bad_alloc&) {
        g_last_error = "cannot allocate array storage";
        return nullptr;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

OIFArrayF64* oif_init_array_f64_from_data(intptr_t nd, const intptr_t* dimensions,
                                          double* data) {
    if (nd < 1 || dimensions == nullptr) {
        g_last_error = "array must have at least one dimension";
        return nullptr;
    }
    try {
        OwnedArray* owned = new_array(nd, dimensions, false);
        owned->record.data = data;
        return &owned->record;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

void oif_free_array_f64(OIFArrayF64* array) {
    if (array == nullptr) {
        return;
    }
    auto* owned = reinterpret_cast<OwnedArray*>(array);
    delete[] owned->data;
    delete[] owned->dims;
    delete owned;
}

OIFConfigDict* oif_config_dict_create(void) {
    try {
        return &(new OwnedDict{{0, nullptr}, new oif::ConfigDict, new std::vector<std::uint8_t>})
                    ->record;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return nullptr;
    }
}

namespace {

int add_entry(OIFConfigDict* dict, const char* key, oif::ConfigDict::Value value) {
    if (dict == nullptr || key == nullptr) {
        g_last_error = "null config dict or key";
        return OIF_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        auto* owned = reinterpret_cast<OwnedDict*>(dict);
        owned->dict->add(key, value);
        *owned->bytes = owned->dict->encode();
        owned->record.size = owned->bytes->size();
        owned->record.bytes = owned->bytes->data();
        return oif::Status::ok();
    });
}

}  // namespace

int oif_config_dict_add_int(OIFConfigDict* dict, const char* key, int32_t value) {
    return add_entry(dict, key, value);
}

int oif_config_dict_add_double(OIFConfigDict* dict, const char* key, double value) {
    return add_entry(dict, key, value);
}

void oif_config_dict_free(OIFConfigDict* dict) {
    if (dict == nullptr) {
        return;
    }
    auto* owned = reinterpret_cast<OwnedDict*>(dict);
    delete owned->dict;
    delete owned->bytes;
    delete owned;
}

int oif_ivp_set_initial_value(ImplHandle implh, OIFArrayF64* y0, double t0) {
    if (y0 == nullptr) {
        g_last_error = "null y0";
        return OIF_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { return oif::ivp::set_initial_value(implh, y0, t0); });
}

int oif_ivp_set_rhs_fn(ImplHandle implh, OIFRhsFn rhs) {
    OIFCallback cb{OIF_LANG_NATIVE, reinterpret_cast<void*>(rhs), rhs, nullptr};
    return guarded([&] { return oif::ivp::set_rhs_fn(implh, &cb); });
}

int oif_ivp_set_rhs_callback(ImplHandle implh, OIFCallback* rhs) {
    return guarded([&] { return oif::ivp::set_rhs_fn(implh, rhs); });
}

int oif_ivp_set_tolerances(ImplHandle implh, double reltol, double abstol) {
    return guarded([&] { return oif::ivp::set_tolerances(implh, reltol, abstol); });
}

int oif_ivp_set_user_data(ImplHandle implh, void* user_data) {
    return guarded([&] { return oif::ivp::set_user_data(implh, user_data); });
}

int oif_ivp_set_integrator(ImplHandle implh, const char* name, OIFConfigDict* params) {
    if (name == nullptr) {
        g_last_error = "null integrator name";
        return OIF_ERR_INVALID_ARGUMENT;
    }
    OIFConfigDict empty{0, nullptr};
    return guarded([&] {
        return oif::ivp::set_integrator(implh, name, params != nullptr ? params : &empty);
    });
}

int oif_ivp_integrate(ImplHandle implh, double t, OIFArrayF64* y) {
    if (y == nullptr) {
        g_last_error = "null output array";
        return OIF_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { return oif::ivp::integrate(implh, t, y); });
}

}  // extern "C"
