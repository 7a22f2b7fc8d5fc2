/* signseg — sign segmentation toolkit, C API.
 *
 * All functions return sgs_status; on failure sgs_last_error() holds a
 * thread-local message. Handles are opaque and freed by their _close
 * function. Tag codes are 0=O (outside), 1=I (inside), 2=B (beginning).
 */
#ifndef SIGNSEG_H_
#define SIGNSEG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SGS_API __declspec(dllexport)
#else
#define SGS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgs_status {
  SGS_OK = 0,
  SGS_USAGE_ERROR = 1,      /* bad arguments (e.g. null pointers) */
  SGS_VALIDATION_ERROR = 2, /* bad config or data */
  SGS_RUNTIME_ERROR = 3     /* I/O or internal failure */
} sgs_status;

SGS_API const char* sgs_version(void);
SGS_API const char* sgs_last_error(void);

/* ---- pipeline commands ------------------------------------------------
 * config_json is the full configuration document (the same JSON the CLI
 * reads from --config); pass "{}" for all defaults.
 */

/* Generates the synthetic dataset into out_dir (sample files plus
 * manifest.json with a seeded train/dev/test split). */
SGS_API sgs_status sgs_synth(const char* config_json, const char* out_dir,
                             uint64_t seed);

/* Trains on the manifest's train/dev splits; writes model.sgck,
 * train_state.sgck and train_log.jsonl into out_dir. With
 * run_ablation != 0 writes ablation.json (the five-row grid) instead. */
SGS_API sgs_status sgs_train(const char* config_json,
                             const char* manifest_path, const char* out_dir,
                             int run_ablation);

/* Evaluates a checkpoint over one split ("train"|"dev"|"test") and writes
 * the report JSON. oracle_predictions != 0 substitutes the labels for the
 * predictions (test hook; checkpoint_path may then be NULL). */
SGS_API sgs_status sgs_eval(const char* config_json,
                            const char* checkpoint_path,
                            const char* manifest_path, const char* split,
                            int oracle_predictions,
                            const char* out_report_path);

/* Runs windowed inference over sample files; writes
 * <sample_id>.pred.json per input into out_dir. */
SGS_API sgs_status sgs_predict(const char* config_json,
                               const char* checkpoint_path,
                               const char* const* sample_paths,
                               size_t num_samples, const char* out_dir);

/* Renders summary.txt plus timeline SVGs. eval_report_path may be NULL
 * when predictions_dir and a labeled manifest are given; predictions_dir,
 * manifest_path and split may be NULL when only the summary is wanted. */
SGS_API sgs_status sgs_report(const char* eval_report_path,
                              const char* predictions_dir,
                              const char* manifest_path, const char* split,
                              const char* out_dir);

/* ---- sample files ---------------------------------------------------- */

typedef struct sgs_sample sgs_sample;

SGS_API sgs_status sgs_sample_open(const char* path, sgs_sample** out_sample);
SGS_API void sgs_sample_close(sgs_sample* sample);
SGS_API int64_t sgs_sample_frames(const sgs_sample* sample);
SGS_API const char* sgs_sample_id(const sgs_sample* sample);
SGS_API double sgs_sample_frame_rate(const sgs_sample* sample);
SGS_API int sgs_sample_has_labels(const sgs_sample* sample);
/* Copies the per-frame tag codes; capacity must be >= frame count. */
SGS_API sgs_status sgs_sample_labels(const sgs_sample* sample,
                                     uint8_t* out_tags, size_t capacity);

/* ---- tag utilities ----------------------------------------------------
 * Segments are inclusive [start, end] frame spans.
 */

/* Decodes tags into segments. promote_orphans != 0 starts a segment at
 * the first I of a B-less run; otherwise such runs are dropped. Call with
 * out_starts/out_ends NULL to query the count. */
SGS_API sgs_status sgs_segments_from_tags(const uint8_t* tags,
                                          size_t num_tags,
                                          int promote_orphans,
                                          int64_t* out_starts,
                                          int64_t* out_ends, size_t capacity,
                                          size_t* out_count);

/* Encodes sorted non-overlapping segments as tags over `frames` frames. */
SGS_API sgs_status sgs_tags_from_segments(const int64_t* starts,
                                          const int64_t* ends,
                                          size_t num_segments, int64_t frames,
                                          uint8_t* out_tags);

/* ---- metrics ---------------------------------------------------------- */

/* Evaluates one prediction against ground truth; returns the report as a
 * malloc'd JSON string (free with sgs_string_free). metric_config_json may
 * be NULL for defaults. */
SGS_API sgs_status sgs_evaluate_tags(const uint8_t* pred, const uint8_t* gt,
                                     size_t num_tags,
                                     const char* metric_config_json,
                                     char** out_report_json);

SGS_API void sgs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SIGNSEG_H_ */
