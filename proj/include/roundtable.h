/* roundtable: multi-agent discussion simulation and convergence metrics.
 *
 * C interface of the shared library. All functions are synchronous and
 * thread-compatible: distinct sessions may be used from distinct threads; a
 * single session must not be shared without external locking. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with rtb_string_free().
 */
#ifndef ROUNDTABLE_H
#define ROUNDTABLE_H

#include <stddef.h>

#if defined(_WIN32)
#define RTB_API __declspec(dllexport)
#else
#define RTB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rtb_status {
  RTB_OK = 0,
  RTB_PARTIAL = 1, /* finished, but some work was skipped; see the summary */
  RTB_ERR_INVALID_ARGUMENT = 2,
  RTB_ERR_IO = 3,
  RTB_ERR_PARSE = 4,
  RTB_ERR_BACKEND = 5,
  RTB_ERR_METRIC = 6,
  RTB_ERR_INTERNAL = 7
} rtb_status;

/* Opaque handle carrying per-session error state. */
typedef struct rtb_session rtb_session;

RTB_API rtb_session* rtb_session_new(void);
RTB_API void rtb_session_free(rtb_session* session);

/* Library version, static storage. */
RTB_API const char* rtb_version(void);

/* Message and stable code ("io_error", "dim_mismatch", ...) of the last
 * failed call on this session. Pointers stay valid until the next call on
 * the same session. Empty strings when no error occurred. */
RTB_API const char* rtb_last_error(const rtb_session* session);
RTB_API const char* rtb_last_error_code(const rtb_session* session);

/* Runs the simulation described by the JSON config at `config_path`:
 * loads/filters items, runs every (group size x round count) grid cell, and
 * writes transcripts plus run_report.json under the configured output
 * directory. On success *run_report_json (optional) receives the run report.
 * Returns RTB_PARTIAL when some discussions failed and were persisted as
 * incomplete transcripts. */
RTB_API rtb_status rtb_simulate(rtb_session* session, const char* config_path,
                                char** run_report_json);

/* Tuning knobs for rtb_analyze. Initialize with rtb_analyze_options_init to
 * pick up defaults, then override fields. String fields may be NULL. */
typedef struct rtb_analyze_options {
  int include_incomplete;       /* default 0: incomplete transcripts are skipped */
  int grid_bins;                /* opinion-confidence grid resolution, default 50 */
  int export_pca2d;             /* also write 2-D map coordinates, default 0 */
  double twonn_discard_fraction; /* dimension estimator tail discard, default 0.1 */
  const char* lexicon_path;     /* confidence lexicon; NULL = built-in */
  const char* embeddings_mode;  /* "scripted" (default) or "http" */
  int embeddings_dim;           /* scripted embedding dimension, default 384 */
  const char* embeddings_endpoint; /* http mode: base URL */
  const char* embeddings_model;    /* http mode: model name */
  const char* embeddings_api_key_env; /* http mode: env var naming the key */
  const char* cache_path;       /* embedding cache file; NULL = in-memory */
  const char* cache_format;     /* "jsonl" (default) or "binary" */
} rtb_analyze_options;

RTB_API void rtb_analyze_options_init(rtb_analyze_options* options);

/* Computes metrics over the transcripts under `transcript_dir` and writes
 * one CSV artifact per metric per grid cell plus manifest.json into
 * `out_dir`. `metrics_csv` is a comma-separated subset of
 * "rouge,stability,consistency,confidence,influence,id,opinion"; NULL or ""
 * selects all. On success *summary_json (optional) receives
 * {transcripts_analyzed, artifacts, notes}. Returns RTB_PARTIAL when any
 * step was skipped (the notes say which). */
RTB_API rtb_status rtb_analyze(rtb_session* session, const char* transcript_dir,
                               const char* out_dir, const char* metrics_csv,
                               const rtb_analyze_options* options, char** summary_json);

/* Renders a plain-text digest of an analysis directory into *text. */
RTB_API rtb_status rtb_report(rtb_session* session, const char* analysis_dir, char** text);

/* Unigram/bigram/LCS F1 between two texts; scores_out receives
 * {rouge1, rouge2, rougeL}. */
RTB_API rtb_status rtb_rouge(rtb_session* session, const char* candidate,
                             const char* reference, double scores_out[3]);

/* Lexical confidence of `text` in [-1, 1], using the lexicon file at
 * `lexicon_path` or the built-in lists when NULL. */
RTB_API rtb_status rtb_confidence(rtb_session* session, const char* text,
                                  const char* lexicon_path, double* value_out);

/* Two-nearest-neighbour intrinsic dimension of `n_points` row-major points
 * of dimension `dim`. Pass a negative discard_fraction for the default 0.1. */
RTB_API rtb_status rtb_twonn_id(rtb_session* session, const double* points, size_t n_points,
                                size_t dim, double discard_fraction, double* id_out);

/* Releases a string returned through a char** out-parameter. */
RTB_API void rtb_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* ROUNDTABLE_H */
