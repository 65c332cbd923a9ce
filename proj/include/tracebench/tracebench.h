/* tracebench C API: trace-link experiments over LLM prompts with a
 * deterministic replay backend.
 *
 * Every function returns a tb_status; on failure tb_last_error() holds a
 * message for the calling thread until its next failing call. Strings
 * returned through char** out parameters are owned by the caller and must be
 * released with tb_string_free(). Handles are opaque and freed with their
 * dedicated *_free function.
 *
 * Stage functions take a JSON configuration string; see the README for the
 * full schema. Relative paths in a config resolve against the process
 * working directory, except for tb_run_experiment, which resolves them
 * against the config file's directory.
 */
#ifndef TRACEBENCH_TRACEBENCH_H
#define TRACEBENCH_TRACEBENCH_H

#include <stdint.h>

#if defined(_WIN32)
#define TB_API __declspec(dllexport)
#else
#define TB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tb_status {
    TB_OK = 0,
    TB_ERROR = 1,            /* unexpected failure */
    TB_ERROR_CONFIG = 2,     /* invalid configuration or schema mismatch */
    TB_ERROR_PROVIDER = 3,   /* backend failure, including replay misses */
    TB_ERROR_PARSE = 4,      /* model response could not be parsed */
    TB_ERROR_IO = 5,         /* filesystem failure */
    TB_ERROR_VALIDATION = 6  /* dataset or argument invariant violated */
} tb_status;

typedef struct tb_dataset tb_dataset;

TB_API const char* tb_version(void);

/* Message for the current thread's most recent failure; never NULL. */
TB_API const char* tb_last_error(void);

TB_API void tb_string_free(char* text);

/* Loads and validates a dataset directory (dataset.json descriptor, one
 * <id>.txt per artifact, links csv). */
TB_API tb_status tb_dataset_load(const char* root_dir, tb_dataset** out_dataset);
TB_API tb_status tb_dataset_save(const tb_dataset* dataset, const char* root_dir);

/* {"name", "parents", "children", "true_links", "children_are_code"} */
TB_API tb_status tb_dataset_stats(const tb_dataset* dataset, char** out_json);
TB_API void tb_dataset_free(tb_dataset* dataset);

/* Five representative parents: [{"category":"min|med|max","id":...}, ...] */
TB_API tb_status tb_sample_parents(const tb_dataset* dataset, uint64_t seed, char** out_json);

/* [{"id","schema","tags","description"}, ...] for the built-in catalog. */
TB_API tb_status tb_prompts_list(char** out_json);

/* Raw template file text for one built-in prompt id. */
TB_API tb_status tb_prompt_text(const char* prompt_id, char** out_text);

/* Code-summarization pass; returns a JSON summary of what was written. */
TB_API tb_status tb_summarize(const char* config_json, char** out_json);

/* Pairwise classification lifecycle; returns the report JSON. */
TB_API tb_status tb_classify(const char* config_json, char** out_report_json);

/* Ranking lifecycle (VSM baseline or VSM-initialized LLM re-ranking). */
TB_API tb_status tb_rank(const char* config_json, char** out_report_json);

/* Re-evaluates a written outcomes file against a dataset. */
TB_API tb_status tb_eval(const char* config_json, char** out_report_json);

/* Renders a report JSON string as the human-readable tables. */
TB_API tb_status tb_report_text(const char* report_json, char** out_text);

/* Runs a config file end to end, writing outcomes, report, and any recorded
 * archive under out_dir. */
TB_API tb_status tb_run_experiment(const char* config_path, const char* out_dir,
                                   char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* TRACEBENCH_TRACEBENCH_H */
