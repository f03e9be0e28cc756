// SPDX-License-Identifier: Apache-2.0
//
// Boundary layouts shared by the core library and every implementation
// plugin. This header is plain C so adapters can be written in any language
// with a C foreign-function facility. See docs/plugin-abi.md.

#ifndef OIF_C_ABI_H
#define OIF_C_ABI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Type tags. Values are part of the ABI and never change. */
typedef uint32_t OIFTypeTag;
enum {
    OIF_INT = 1,
    OIF_FLOAT64 = 2,
    OIF_ARRAY_F64 = 3,
    OIF_STR = 4,
    OIF_CALLBACK = 5,
    OIF_USER_DATA = 6,
    OIF_CONFIG_DICT = 7
};

/* Status codes. 0 is success, negative values are error classes. */
enum {
    OIF_OK = 0,
    OIF_ERR_INVALID_ARGUMENT = -1,
    OIF_ERR_ALLOCATION = -2,
    OIF_ERR_TYPE_MISMATCH = -3,
    OIF_ERR_NOT_FOUND = -4,
    OIF_ERR_PLUGIN = -5,
    OIF_ERR_SOLVER = -6
};

typedef int32_t ImplHandle;

/*
 * n-dimensional array of doubles, row-major, contiguous.
 * Field order is fixed: nd, dimensions, data.
 * The record never owns `data`.
 */
typedef struct {
    intptr_t nd;
    intptr_t *dimensions;
    double *data;
} OIFArrayF64;

/* Right-hand side of y' = f(t, y); writes f into ydot. */
typedef int (*OIFRhsFn)(double t, OIFArrayF64 *y, OIFArrayF64 *ydot, void *user_data);

enum {
    OIF_LANG_NATIVE = 1,
    OIF_LANG_SCRIPT = 2
};

/*
 * A user callback. `fn` is always callable from the plugin side; plugins
 * invoke it as fn(t, y, ydot, user_data) with the address most recently
 * given to set_user_data. `src` and `native_fn` describe the callback's
 * origin; `context` belongs to whoever built the record and is carried
 * through the boundary unchanged. The record itself is only valid during the
 * set_rhs_fn call: plugins copy it, and must not call `fn` after their
 * session is destroyed.
 */
typedef struct {
    int32_t src;
    void *native_fn;
    OIFRhsFn fn;
    void *context;
} OIFCallback;

/*
 * Encoded config dictionary. `bytes` holds a sequence of records:
 *   u32 key_length | key bytes (UTF-8, no NUL) | u32 tag | 8-byte value
 * all little-endian. tag is OIF_INT (value is the int32 sign-extended to
 * 64 bits) or OIF_FLOAT64 (value is the IEEE-754 bit pattern).
 */
typedef struct {
    uint64_t size;
    const uint8_t *bytes;
} OIFConfigDict;

/*
 * Packed argument list. arg_values[i] addresses the value of argument i:
 *   OIF_INT         -> int32_t *
 *   OIF_FLOAT64     -> double *
 *   OIF_ARRAY_F64   -> OIFArrayF64 *
 *   OIF_STR         -> const char * (NUL-terminated UTF-8)
 *   OIF_CALLBACK    -> OIFCallback *
 *   OIF_USER_DATA   -> the user address itself
 *   OIF_CONFIG_DICT -> OIFConfigDict *
 */
typedef struct {
    int32_t num_args;
    const OIFTypeTag *arg_types;
    void *const *arg_values;
} OIFArgs;

#ifdef __cplusplus
}
#endif

#endif /* OIF_C_ABI_H */
