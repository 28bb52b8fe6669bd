#ifndef DLAB_DLAB_H
#define DLAB_DLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(DLAB_BUILDING_LIBRARY)
#define DLAB_API __attribute__((visibility("default")))
#else
#define DLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dlab_status {
  DLAB_OK = 0,
  DLAB_ERR_SIZE = 1,
  DLAB_ERR_GEOMETRY = 2,
  DLAB_ERR_RECURRENCE = 3,
  DLAB_ERR_DOMAIN = 4,
  DLAB_ERR_NUMERIC = 5,
  DLAB_ERR_SAMPLING = 6,
  DLAB_ERR_INSTANCE = 7,
  DLAB_ERR_RANGE = 8,
  DLAB_ERR_PARSE = 9,
  DLAB_ERR_IO = 10,
  DLAB_ERR_ARGUMENT = 11, /* null pointer or out-of-range index */
  DLAB_ERR_INTERNAL = 12
} dlab_status;

typedef struct dlab_space dlab_space;
typedef struct dlab_spectrum dlab_spectrum;

DLAB_API const char* dlab_version(void);
/* Message of the last failed call on this thread; "" after a success. */
DLAB_API const char* dlab_last_error(void);
DLAB_API const char* dlab_status_name(dlab_status status);
/* Frees every char* handed out by this library. */
DLAB_API void dlab_string_free(char* s);

/* Spaces: "gasket:<level>", "lattice:<dim>:<extent>[:periodic]", "path:<n>",
   or the same as a JSON object {"kind": ..., ...}. */
DLAB_API dlab_status dlab_space_create(const char* spec, dlab_space** out);
DLAB_API void dlab_space_free(dlab_space* space);
DLAB_API dlab_status dlab_space_size(const dlab_space* space, size_t* out);
DLAB_API dlab_status dlab_space_json(const dlab_space* space, char** out);

/* Domains: "whole", "ball:c:r", "cball:c:r", "range:a:b", "vertices:a,b,...".
   Potentials: "zero", "const:c", "well:c:r:depth", "values:v0,v1,..."; NULL means zero. */
DLAB_API dlab_status dlab_spectrum_create(const dlab_space* space, const char* domain, const char* potential,
                                          dlab_spectrum** out);
DLAB_API void dlab_spectrum_free(dlab_spectrum* spectrum);
DLAB_API dlab_status dlab_spectrum_size(const dlab_spectrum* spectrum, size_t* out);
DLAB_API dlab_status dlab_spectrum_eigenvalue(const dlab_spectrum* spectrum, size_t n, double* out);
/* First k eigenpairs (k = 0: all) as "index,eigenvalue" and "vertex,phi_0,..." CSV. */
DLAB_API dlab_status dlab_spectrum_csv(const dlab_spectrum* spectrum, size_t k, char** eigenvalues, char** modes);

DLAB_API dlab_status dlab_heat_kernel(const dlab_spectrum* spectrum, double t, size_t x, size_t y, double* out);
DLAB_API dlab_status dlab_green(const dlab_spectrum* spectrum, size_t x, size_t y, double* out);
/* Rows "t,x,y,p,bound,ratio": p from the spectrum, bound from the upper
   envelope fitted on the whole space, ratio = p / bound. */
DLAB_API dlab_status dlab_heat_csv(const dlab_space* space, const dlab_spectrum* spectrum, const double* times,
                                   size_t n_times, size_t x, size_t y, char** out);

/* {"exact", "mc", "stderr", ...} for P_start(hit target by deadline). */
DLAB_API dlab_status dlab_hitting_json(const dlab_space* space, const char* target, size_t start, double deadline,
                                       size_t paths, uint64_t seed, char** out);
/* {"exact", "mc", "stderr", "median", ...} for the exit time of a domain. */
DLAB_API dlab_status dlab_exit_time_json(const dlab_space* space, const char* domain, size_t start, size_t paths,
                                         uint64_t seed, char** out);
/* Norms of the negative part of a potential on a domain. */
DLAB_API dlab_status dlab_norms_json(const dlab_space* space, const char* domain, const char* potential, double p,
                                     char** out);

DLAB_API dlab_status dlab_mittag_leffler(double ell, double x, double* out);
/* Phi(s) = sup_r (s/r - 1/r^beta), closed form. */
DLAB_API dlab_status dlab_phi(double beta, double s, double* out);

/* Runs a certificate suite. kind may be NULL when the config names it.
   Returns the process exit code (0 pass, 1 certificate failure, 2 invalid
   config or I/O) and, when message is not NULL, a human-readable summary. */
DLAB_API int dlab_verify(const char* kind, const char* config_json, const char* out_dir, char** message);

DLAB_API dlab_status dlab_plot_svg(const char* plot_json, char** out);

#ifdef __cplusplus
}
#endif

#endif
