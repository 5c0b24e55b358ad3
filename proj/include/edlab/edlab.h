#ifndef EDLAB_H
#define EDLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define EDLAB_API __attribute__((visibility("default")))
#else
#define EDLAB_API
#endif

typedef enum edlab_status {
  EDLAB_OK = 0,
  EDLAB_ERR_INVALID_ARGUMENT = 1,
  EDLAB_ERR_VALIDATION = 2,
  EDLAB_ERR_NUMERICAL = 3,
  EDLAB_ERR_IO = 4,
  EDLAB_ERR_NODE = 5,
  EDLAB_ERR_INTERNAL = 6
} edlab_status;

typedef struct edlab_scenario edlab_scenario;
typedef struct edlab_report edlab_report;

/* Unset fields (NULL, has_* = 0) fall back to the scenario's own values. */
typedef struct edlab_run_options {
  const char* out_dir;
  int has_seed;
  uint64_t seed;
  int has_snapshot_every;
  size_t snapshot_every;
  const char* solvers; /* comma list: walkers,fields,schrodinger */
} edlab_run_options;

EDLAB_API const char* edlab_version(void);

/* Message of the last failed call on this thread; empty after success. */
EDLAB_API const char* edlab_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
EDLAB_API void edlab_string_free(char* s);

EDLAB_API edlab_status edlab_scenario_from_json(const char* json, edlab_scenario** out);
EDLAB_API edlab_status edlab_scenario_from_file(const char* path, edlab_scenario** out);
EDLAB_API edlab_status edlab_scenario_from_preset(const char* name, const char* const* overrides,
                                                  size_t n_overrides, edlab_scenario** out);
EDLAB_API void edlab_scenario_free(edlab_scenario* scenario);
EDLAB_API edlab_status edlab_scenario_config(const edlab_scenario* scenario, char** json);

/* Writes the validation result ({"valid", "errors", "warnings", ...}) to
   *result. Returns EDLAB_ERR_VALIDATION when the config is invalid. */
EDLAB_API edlab_status edlab_validate_json(const char* json, char** result);
EDLAB_API edlab_status edlab_validate_file(const char* path, char** result);

EDLAB_API edlab_status edlab_preset_config(const char* name, const char* const* overrides,
                                           size_t n_overrides, char** json);
EDLAB_API edlab_status edlab_preset_names(char** json);

EDLAB_API void edlab_run_options_init(edlab_run_options* options);
EDLAB_API edlab_status edlab_run(const edlab_scenario* scenario, const edlab_run_options* options,
                                 edlab_report** out);
EDLAB_API edlab_status edlab_report_json(const edlab_report* report, char** json);
EDLAB_API int edlab_report_passed(const edlab_report* report);
EDLAB_API void edlab_report_free(edlab_report* report);

EDLAB_API edlab_status edlab_compare_snapshots(const char* a, const char* b, char** json);
EDLAB_API edlab_status edlab_gauge_check(const edlab_scenario* scenario, char** json, int* passed);
EDLAB_API edlab_status edlab_circulation(const edlab_scenario* scenario, const char* loop, char** json);

/* q = c eta beta; quantized when q / (hbar c) is an integer mu. */
EDLAB_API edlab_status edlab_charge(double c, double eta, double beta, double hbar, double* charge,
                                    int* quantized, long* mu);

#ifdef __cplusplus
}
#endif

#endif
