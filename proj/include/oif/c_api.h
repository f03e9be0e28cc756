/* SPDX-License-Identifier: Apache-2.0 */

/*
 * C user-side API of the core library. Also the surface that scripting
 * bindings load through their foreign-function facility.
 *
 * Every function returning int returns 0 on success or a negative OIF_ERR_*
 * code; oif_last_error() then describes the most recent failure on the
 * calling thread.
 */

#ifndef OIF_C_API_H
#define OIF_C_API_H

#include "oif/c_abi.h"

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define OIF_API __attribute__((visibility("default")))
#else
#define OIF_API
#endif

/* Returns a handle >= 0, or a negative status. */
OIF_API ImplHandle oif_init_impl(const char *interface_name, const char *impl_name,
                                 int version_major, int version_minor);
OIF_API int oif_unload_impl(ImplHandle implh);
OIF_API int oif_call_impl(ImplHandle implh, const char *method, const OIFArgs *in_args,
                          const OIFArgs *out_args);
OIF_API const char *oif_last_error(void);

/* Zero-initialized array owning its storage; NULL on failure. */
OIF_API OIFArrayF64 *oif_create_array_f64(intptr_t nd, const intptr_t *dimensions);
/* View over caller storage; only the record is freed by oif_free_array_f64. */
OIF_API OIFArrayF64 *oif_init_array_f64_from_data(intptr_t nd, const intptr_t *dimensions,
                                                  double *data);
OIF_API void oif_free_array_f64(OIFArrayF64 *array);

OIF_API OIFConfigDict *oif_config_dict_create(void);
OIF_API int oif_config_dict_add_int(OIFConfigDict *dict, const char *key, int32_t value);
OIF_API int oif_config_dict_add_double(OIFConfigDict *dict, const char *key, double value);
OIF_API void oif_config_dict_free(OIFConfigDict *dict);

/* IVP gateway. */
OIF_API int oif_ivp_set_initial_value(ImplHandle implh, OIFArrayF64 *y0, double t0);
OIF_API int oif_ivp_set_rhs_fn(ImplHandle implh, OIFRhsFn rhs);
OIF_API int oif_ivp_set_rhs_callback(ImplHandle implh, OIFCallback *rhs);
OIF_API int oif_ivp_set_tolerances(ImplHandle implh, double reltol, double abstol);
OIF_API int oif_ivp_set_user_data(ImplHandle implh, void *user_data);
OIF_API int oif_ivp_set_integrator(ImplHandle implh, const char *name, OIFConfigDict *params);
OIF_API int oif_ivp_integrate(ImplHandle implh, double t, OIFArrayF64 *y);

#ifdef __cplusplus
}
#endif

#endif /* OIF_C_API_H */
