#ifndef DISCYCLE_DISCYCLE_H
#define DISCYCLE_DISCYCLE_H

/* C interface of the discycle library. Objects are opaque handles released
 * with the matching *_free function; strings returned through char** are
 * released with dc_string_free. Every call returns a dc_status and, on
 * failure, leaves a message readable with dc_last_error() on the calling
 * thread. Vertices are 1-based in all text formats. */

#include <stdint.h>

#if defined(DISCYCLE_BUILDING_LIBRARY)
#define DC_API __attribute__((visibility("default")))
#else
#define DC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dc_status {
  DC_OK = 0,
  DC_ERR_INVALID_ARGUMENT,
  DC_ERR_PARSE,
  DC_ERR_IO,
  DC_ERR_SINGULAR_SYSTEM,
  DC_ERR_ILL_CONDITIONED,
  DC_ERR_DEGENERATE_DENOMINATOR,
  DC_ERR_COMPLEX_ROOTS,
  DC_ERR_DEGENERATE_VARIANCE,
  DC_ERR_ZERO_DIVISOR,
  DC_ERR_EXPONENTIAL_BLOWUP,
  DC_ERR_UNSTABLE_BOTH_WAYS,
  DC_ERR_NO_STABLE_ORIENTATION,
  DC_ERR_NON_CONVERGENCE,
  DC_ERR_INTERNAL
} dc_status;

typedef struct dc_graph dc_graph;
typedef struct dc_model dc_model;
typedef struct dc_dataset dc_dataset;
typedef struct dc_moments dc_moments;
typedef struct dc_result dc_result;

DC_API const char* dc_last_error(void);
DC_API const char* dc_status_name(dc_status status);
/* Non-zero for failures of the numerics rather than of the input. */
DC_API int dc_status_is_numerical(dc_status status);
DC_API void dc_string_free(char* s);

DC_API dc_status dc_read_file(const char* path, char** out);
DC_API dc_status dc_write_file(const char* path, const char* content);

/* {"p": 3, "edges": [[1, 2], [2, 3]]} */
DC_API dc_status dc_graph_from_json(const char* json, dc_graph** out);
DC_API dc_status dc_graph_to_json(const dc_graph* g, char** out);
DC_API int dc_graph_size(const dc_graph* g);
DC_API void dc_graph_free(dc_graph* g);

/* {"p": 3, "edges": [[1, 2, 0.5]], "omega2": [...], "omega3": [...]} */
DC_API dc_status dc_model_from_json(const char* json, dc_model** out);
DC_API dc_status dc_model_to_json(const dc_model* m, char** out);
DC_API dc_status dc_model_graph(const dc_model* m, dc_graph** out);
DC_API void dc_model_free(dc_model* m);

/* dist: "mixnorm" or "gamma"; noise sd of variable v is sqrt(omega2[v]). */
DC_API dc_status dc_simulate(const dc_model* m, const char* dist, int n, uint64_t seed, dc_dataset** out);
DC_API dc_status dc_dataset_from_csv(const char* csv, dc_dataset** out);
DC_API dc_status dc_dataset_to_csv(const dc_dataset* d, char** out);
DC_API int dc_dataset_rows(const dc_dataset* d);
DC_API int dc_dataset_cols(const dc_dataset* d);
DC_API void dc_dataset_free(dc_dataset* d);

DC_API dc_status dc_moments_from_dataset(const dc_dataset* d, int center, dc_moments** out);
DC_API dc_status dc_moments_from_model(const dc_model* m, dc_moments** out);
DC_API dc_status dc_moments_from_json(const char* json, dc_moments** out);
DC_API dc_status dc_moments_to_json(const dc_moments* m, char** out);
DC_API void dc_moments_free(dc_moments* m);

typedef struct dc_discovery_config {
  double alpha;
  const char* correction; /* "none", "holm", "bh" */
  const char* mode;       /* "sample", "population" */
  double tol;
  int center;
} dc_discovery_config;

DC_API void dc_discovery_config_default(dc_discovery_config* cfg);
DC_API dc_status dc_discover_dataset(const dc_dataset* d, const dc_discovery_config* cfg, dc_result** out);
/* Population mode only. */
DC_API dc_status dc_discover_moments(const dc_moments* m, const dc_discovery_config* cfg, dc_result** out);
DC_API dc_status dc_result_to_json(const dc_result* r, char** out);
DC_API int dc_result_halted(const dc_result* r);
DC_API void dc_result_free(dc_result* r);

/* JSON list of graphs; the weighted variant lists transformed models. */
DC_API dc_status dc_equivalence_class(const dc_graph* g, char** out);
DC_API dc_status dc_equivalence_class_weighted(const dc_model* m, char** out);

typedef struct dc_bench_config {
  int p;
  int cycle_size;
  const int* n_values;
  int n_count;
  const char* dist;
  int reps;
  uint64_t seed;
  const double* alphas;
  int alpha_count;
  const char* const* corrections;
  int correction_count;
  const char* mode;
  int threads;
} dc_bench_config;

/* Per-replication records and the per-cell summary, both as CSV. */
DC_API dc_status dc_bench_run(const dc_bench_config* cfg, char** records_csv, char** summary_csv);
DC_API dc_status dc_gnuplot_script(const char* summary_path, char** out);

#ifdef __cplusplus
}
#endif

#endif
