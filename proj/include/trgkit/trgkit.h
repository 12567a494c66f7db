/*
 * trgkit C API: traffic relation graph toolkit.
 *
 * Every function returns trgkit_status; non-zero means failure and
 * trgkit_last_error() carries a message for the calling thread. Objects are
 * opaque handles released with the matching *_free. Strings returned through
 * char** outputs are released with trgkit_string_free.
 *
 * config_json is a pipeline config document (see README); "{}" selects the
 * defaults. meta_json, when non-NULL, is embedded verbatim under a "meta" key
 * of the written artifact.
 */
#ifndef TRGKIT_H
#define TRGKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trgkit_status {
    TRGKIT_OK = 0,
    TRGKIT_ERROR_CONFIG = 2,
    TRGKIT_ERROR_INPUT = 3,
    TRGKIT_ERROR_INTERNAL = 4
} trgkit_status;

typedef struct trgkit_flowset trgkit_flowset;
typedef struct trgkit_graphset trgkit_graphset;
typedef struct trgkit_params trgkit_params;
typedef struct trgkit_pool trgkit_pool;
typedef struct trgkit_split trgkit_split;

const char* trgkit_version(void);
const char* trgkit_last_error(void);
void trgkit_string_free(char* s);

/* validates config_json strictly and returns the fully resolved document */
trgkit_status trgkit_config_resolve(const char* config_json, char** resolved_json);

/* ---- pcap -> flows ---- */

trgkit_status trgkit_flows_build(const char* const* pcap_paths, size_t n_paths,
                                 const char* config_json, trgkit_flowset** out);
trgkit_status trgkit_flows_load(const char* jsonl_path, trgkit_flowset** out);
trgkit_status trgkit_flows_save(const trgkit_flowset* fs, const char* jsonl_path,
                                const char* meta_json);
/* label every flow from `source` (NULL = all flows) */
trgkit_status trgkit_flows_set_label(trgkit_flowset* fs, const char* source, const char* label);
/* {"packets":..,"flows":..,"records":..,"skipped":..,"skip_reasons":{..}} */
trgkit_status trgkit_flows_summary(const trgkit_flowset* fs, char** json_out);
size_t trgkit_flows_count(const trgkit_flowset* fs);
void trgkit_flowset_free(trgkit_flowset* fs);

/* optional packet dump: one JSON object per packet, payload hex lowercase */
trgkit_status trgkit_packets_dump(const char* const* pcap_paths, size_t n_paths,
                                  const char* config_json, const char* out_jsonl,
                                  const char* meta_json);

/* ---- flows -> traffic relation graphs ---- */

trgkit_status trgkit_graphs_build(const trgkit_flowset* fs, const char* config_json,
                                  trgkit_graphset** out);
trgkit_status trgkit_graphs_load(const char* json_path, trgkit_graphset** out);
trgkit_status trgkit_graphs_save(const trgkit_graphset* gs, const char* json_path,
                                 const char* meta_json);
trgkit_status trgkit_graphs_merge(trgkit_graphset* dst, const trgkit_graphset* src);
/* {"graphs":..,"nodes":..,"edges":..,"bursts":..} */
trgkit_status trgkit_graphs_stats(const trgkit_graphset* gs, char** json_out);
/* JSON array of per-graph consensus labels, "" when unlabeled */
trgkit_status trgkit_graphs_labels(const trgkit_graphset* gs, char** json_out);
size_t trgkit_graphs_count(const trgkit_graphset* gs);
void trgkit_graphset_free(trgkit_graphset* gs);

/* ---- alignment training and the surrogate classifier ---- */

trgkit_status trgkit_align_train(const trgkit_graphset* gs, const char* config_json,
                                 trgkit_params** out);
/* stage 2: fit the task head on labeled graphs */
trgkit_status trgkit_task_train(trgkit_params* params, const trgkit_graphset* gs,
                                const char* config_json);
trgkit_status trgkit_params_save(const trgkit_params* params, const char* path,
                                 const char* meta_json);
trgkit_status trgkit_params_load(const char* path, trgkit_params** out);
/* {"classes":[..],"align_trace":[..],"task_trace":[..]} */
trgkit_status trgkit_params_info(const trgkit_params* params, char** json_out);
/* {"label":"..","scores":{class: prob, ..}} */
trgkit_status trgkit_classify(const trgkit_params* params, const trgkit_graphset* gs,
                              size_t index, char** json_out);
void trgkit_params_free(trgkit_params* params);

/* ---- instruction-tuning data ---- */

trgkit_status trgkit_instr_generate(const trgkit_graphset* gs, const char* config_json,
                                    const char* out_jsonl, const char* meta_json,
                                    size_t* n_samples);

/* ---- O.O.D. splits and the Non-I.I.D. index ---- */

trgkit_status trgkit_pool_load(const char* jsonl_path, trgkit_pool** out);
trgkit_status trgkit_pool_from_pcap_map(const char* map_json_path, const char* config_json,
                                        trgkit_pool** out);
size_t trgkit_pool_count(const trgkit_pool* pool);
void trgkit_pool_free(trgkit_pool* pool);

trgkit_status trgkit_split_build(const trgkit_pool* pool, const char* config_json,
                                 trgkit_split** out);
trgkit_status trgkit_split_save(const trgkit_split* split, const char* path,
                                const char* meta_json);
trgkit_status trgkit_split_load(const char* path, trgkit_split** out);
void trgkit_split_free(trgkit_split* split);

/* {"classes":{name: ni, ..},"mean_ni":..} over the pool's stored features */
trgkit_status trgkit_ni_report(const trgkit_pool* pool, const trgkit_split* split,
                               char** json_out);

/* train/test component subset counts for one class of n components */
trgkit_status trgkit_count_subsets(uint64_t n_components, uint64_t* train_count,
                                   uint64_t* test_count);

/* ---- evaluation ---- */

trgkit_status trgkit_eval_files(const char* preds_jsonl, const char* truths_jsonl,
                                char** report_json, char** report_text);

#ifdef __cplusplus
}
#endif

#endif /* TRGKIT_H */
