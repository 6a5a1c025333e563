#ifndef HBL_HBL_H
#define HBL_HBL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HBL_API __declspec(dllexport)
#else
#define HBL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hbl_status {
  HBL_OK = 0,
  HBL_ERR_INVALID_PARAMETER = 1,
  HBL_ERR_PARSE = 2,
  HBL_ERR_DATA = 3,
  HBL_ERR_DEGENERATE_SPACE = 4,
  HBL_ERR_AMP_FAILURE = 5,
  HBL_ERR_NON_CONTRACTION = 6,
  HBL_ERR_UNSUPPORTED = 7,
  HBL_ERR_IO = 8,
  HBL_ERR_INTERNAL = 9
} hbl_status;

typedef struct hbl_space hbl_space;
typedef struct hbl_forest hbl_forest;
typedef struct hbl_kernel hbl_kernel;
typedef struct hbl_run_report hbl_run_report;

HBL_API const char* hbl_version(void);
HBL_API const char* hbl_status_name(hbl_status status);
/* Message of the last failed call on this thread; "" after a success. */
HBL_API const char* hbl_last_error(void);
/* Releases strings returned through char** out-parameters. */
HBL_API void hbl_string_free(char* s);

/* Spaces. `spec_json` is a generator spec such as
   {"generator": "tree", "q": 3, "depth": 4}. */
HBL_API hbl_status hbl_space_generate(const char* spec_json, hbl_space** out);
HBL_API hbl_status hbl_space_parse(const char* space_json, hbl_space** out);
HBL_API hbl_status hbl_space_load(const char* path, hbl_space** out);
HBL_API hbl_status hbl_space_to_json(const hbl_space* space, char** out);
HBL_API size_t hbl_space_size(const hbl_space* space);
HBL_API void hbl_space_free(hbl_space* space);

/* Sample functions as {"values": ...} JSON. spec: {"kind": "gaussian", "seed"} |
   {"kind": "log_distance", "origin": id} |
   {"kind": "local_mean_zero", "center": id, "radius", "seed"} |
   {"kind": "global_mean_zero", "seed"} */
HBL_API hbl_status hbl_function_generate(const hbl_space* space, const char* spec_json, char** out);

/* Dyadic forests. A forest is only meaningful with the space it was built or
   parsed against. */
HBL_API hbl_status hbl_forest_build(const hbl_space* space, double delta, int random_tie_break, uint64_t seed,
                                    hbl_forest** out);
HBL_API hbl_status hbl_forest_parse(const hbl_space* space, const char* forest_json, hbl_forest** out);
/* {"forest": ..., "verification": {"ok", "violations", "a0", "c1"}} */
HBL_API hbl_status hbl_forest_report(const hbl_space* space, const hbl_forest* forest, char** out);
HBL_API void hbl_forest_free(hbl_forest* forest);

/* Function arguments are JSON text {"values": {pointId: real}}.
   `options_json` may be NULL for defaults. */

/* options: {"k_floor": int, "eta_prime", "eps", "b0", "seed"}; `csv_out` may
   be NULL. */
HBL_API hbl_status hbl_maximal(const hbl_space* space, const hbl_forest* forest, const char* f_json,
                               const char* options_json, char** report_out, char** csv_out);
HBL_API hbl_status hbl_h1_norm(const hbl_space* space, const char* g_json, double b, int with_terms, char** out);
HBL_API hbl_status hbl_bmo_norm(const hbl_space* space, const char* f_json, double q, double b, char** out);
/* atom: {"center": id, "radius": r, "values": {...}};
   options: {"c", "b", "beta", "r0", "discrete"} */
HBL_API hbl_status hbl_split_atom(const hbl_space* space, const char* atom_json, const char* options_json, char** out);
/* options: {"b0", "q", "r0", "beta"} */
HBL_API hbl_status hbl_jn(const hbl_space* space, const hbl_forest* forest, const char* f_json,
                          const char* options_json, char** report_out, char** csv_out);
HBL_API hbl_status hbl_pairing(const hbl_space* space, const char* f_json, const char* g_json, double b, char** out);

/* Kernel operators. multiplier: {"kind": "heat", "t"} | {"kind": "resolvent", "s"} |
   {"kind": "band", "cutoff", "width"} | {"kind": "polynomial", "coeffs"}. */
HBL_API hbl_status hbl_kernel_multiplier(const hbl_space* space, const char* multiplier_json, hbl_kernel** out);
HBL_API hbl_status hbl_kernel_parse(const hbl_space* space, const char* kernel_json, hbl_kernel** out);
HBL_API hbl_status hbl_kernel_to_json(const hbl_space* space, const hbl_kernel* kernel, char** out);
HBL_API hbl_status hbl_kernel_report(const hbl_space* space, const hbl_kernel* kernel, double b, size_t samples,
                                     uint64_t seed, char** out);
HBL_API void hbl_kernel_free(hbl_kernel* kernel);

/* Experiment runs. Config problems surface as HBL_ERR_INVALID_PARAMETER
   before any computation. HBL_SEED in the environment replaces the seed. */
HBL_API hbl_status hbl_run(const char* config_json, int parallel, hbl_run_report** out);
/* 0 when every hard assertion held, 1 otherwise. */
HBL_API int hbl_run_exit_code(const hbl_run_report* report);
HBL_API size_t hbl_run_hard_failure_count(const hbl_run_report* report);
HBL_API const char* hbl_run_hard_failure(const hbl_run_report* report, size_t i);
HBL_API hbl_status hbl_run_report_json(const hbl_run_report* report, char** out);
HBL_API hbl_status hbl_run_timing_json(const hbl_run_report* report, char** out);
/* Writes report.json, timing.json and the CSV files; NULL `dir` uses the
   configured output directory. */
HBL_API hbl_status hbl_run_write(const hbl_run_report* report, const char* dir);
HBL_API void hbl_run_report_free(hbl_run_report* report);

#ifdef __cplusplus
}
#endif

#endif
