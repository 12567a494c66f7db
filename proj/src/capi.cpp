#include "trgkit/trgkit.h"

#include <cstring>
#include <numeric>

#include "json.hpp"

#include "trgkit/align.hpp"
#include "trgkit/metrics.hpp"
#include "trgkit/pipeline.hpp"

struct trgkit_flowset {
    trgkit::FlowSet fs;
};
struct trgkit_graphset {
    std::vector<trgkit::TrafficRelationGraph> graphs;
};
struct trgkit_params {
    trgkit::ProjectorParams params;
    uint64_t seed = 0;
    std::vector<double> align_trace;
    std::vector<double> task_trace;
};
struct trgkit_pool {
    trgkit::LabeledPool pool;
};
struct trgkit_split {
    trgkit::DatasetSplit split;
};

namespace {

thread_local std::string g_last_error;

trgkit_status fail(const std::exception& e, trgkit_status code) {
    g_last_error = e.what();
    return code;
}

template <typename Fn>
trgkit_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return TRGKIT_OK;
    } catch (const trgkit::Error& e) {
        return fail(e, static_cast<trgkit_status>(static_cast<int>(e.category())));
    } catch (const std::exception& e) {
        return fail(e, TRGKIT_ERROR_INTERNAL);
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

trgkit::PipelineConfig parse_config(const char* config_json) {
    return trgkit::config_from_json(config_json && *config_json ? config_json : "{}");
}

std::string meta_or_empty(const char* meta_json) {
    return meta_json ? std::string(meta_json) : std::string();
}

void require(bool ok, const char* what) {
    if (!ok) throw trgkit::Error(trgkit::errc::input, "NullArgument", what);
}

}  // namespace

extern "C" {

const char* trgkit_version(void) { return trgkit::kToolVersion; }

const char* trgkit_last_error(void) { return g_last_error.c_str(); }

void trgkit_string_free(char* s) { std::free(s); }

trgkit_status trgkit_config_resolve(const char* config_json, char** resolved_json) {
    return guarded([&] {
        require(resolved_json, "out must be non-NULL");
        *resolved_json = dup_string(trgkit::config_to_json(parse_config(config_json)));
    });
}

trgkit_status trgkit_flows_build(const char* const* pcap_paths, size_t n_paths,
                                 const char* config_json, trgkit_flowset** out) {
    return guarded([&] {
        require(pcap_paths && out, "pcap_paths/out must be non-NULL");
        std::vector<std::string> paths(pcap_paths, pcap_paths + n_paths);
        auto cfg = parse_config(config_json);
        auto fs = std::make_unique<trgkit_flowset>();
        fs->fs = trgkit::flows_from_pcaps(paths, cfg);
        *out = fs.release();
    });
}

trgkit_status trgkit_flows_load(const char* jsonl_path, trgkit_flowset** out) {
    return guarded([&] {
        require(jsonl_path && out, "path/out must be non-NULL");
        auto fs = std::make_unique<trgkit_flowset>();
        fs->fs = trgkit::load_flows_jsonl(jsonl_path);
        *out = fs.release();
    });
}

trgkit_status trgkit_flows_save(const trgkit_flowset* fs, const char* jsonl_path,
                                const char* meta_json) {
    return guarded([&] {
        require(fs && jsonl_path, "flowset/path must be non-NULL");
        trgkit::save_flows_jsonl(fs->fs, jsonl_path, meta_or_empty(meta_json));
    });
}

trgkit_status trgkit_flows_set_label(trgkit_flowset* fs, const char* source, const char* label) {
    return guarded([&] {
        require(fs && label, "flowset/label must be non-NULL");
        for (auto& f : fs->fs.flows) {
            if (!source ||
                (f.source_id < fs->fs.sources.size() && fs->fs.sources[f.source_id] == source))
                f.label = label;
        }
    });
}

trgkit_status trgkit_flows_summary(const trgkit_flowset* fs, char** json_out) {
    return guarded([&] {
        require(fs && json_out, "flowset/out must be non-NULL");
        nlohmann::json j;
        j["flows"] = fs->fs.flows.size();
        j["packets"] = fs->fs.yielded_packets;
        j["records"] = fs->fs.total_records;
        j["skipped"] = fs->fs.skipped_packets;
        j["skip_reasons"] = fs->fs.skip_reasons;
        j["sources"] = fs->fs.sources;
        *json_out = dup_string(j.dump());
    });
}

size_t trgkit_flows_count(const trgkit_flowset* fs) { return fs ? fs->fs.flows.size() : 0; }

void trgkit_flowset_free(trgkit_flowset* fs) { delete fs; }

trgkit_status trgkit_packets_dump(const char* const* pcap_paths, size_t n_paths,
                                  const char* config_json, const char* out_jsonl,
                                  const char* meta_json) {
    return guarded([&] {
        require(pcap_paths && out_jsonl, "pcap_paths/out must be non-NULL");
        std::vector<std::string> paths(pcap_paths, pcap_paths + n_paths);
        trgkit::dump_packets_jsonl(paths, parse_config(config_json), out_jsonl,
                                   meta_or_empty(meta_json));
    });
}

trgkit_status trgkit_graphs_build(const trgkit_flowset* fs, const char* config_json,
                                  trgkit_graphset** out) {
    return guarded([&] {
        require(fs && out, "flowset/out must be non-NULL");
        auto gs = std::make_unique<trgkit_graphset>();
        gs->graphs = trgkit::graphs_from_flows(fs->fs, parse_config(config_json));
        *out = gs.release();
    });
}

trgkit_status trgkit_graphs_load(const char* json_path, trgkit_graphset** out) {
    return guarded([&] {
        require(json_path && out, "path/out must be non-NULL");
        auto gs = std::make_unique<trgkit_graphset>();
        gs->graphs = trgkit::load_graphs_json(json_path);
        *out = gs.release();
    });
}

trgkit_status trgkit_graphs_save(const trgkit_graphset* gs, const char* json_path,
                                 const char* meta_json) {
    return guarded([&] {
        require(gs && json_path, "graphset/path must be non-NULL");
        trgkit::save_graphs_json(gs->graphs, json_path, meta_or_empty(meta_json));
    });
}

trgkit_status trgkit_graphs_merge(trgkit_graphset* dst, const trgkit_graphset* src) {
    return guarded([&] {
        require(dst && src, "graphsets must be non-NULL");
        dst->graphs.insert(dst->graphs.end(), src->graphs.begin(), src->graphs.end());
    });
}

trgkit_status trgkit_graphs_stats(const trgkit_graphset* gs, char** json_out) {
    return guarded([&] {
        require(gs && json_out, "graphset/out must be non-NULL");
        size_t nodes = 0, edges = 0, bursts = 0;
        for (const auto& g : gs->graphs) {
            nodes += g.flows.size();
            edges += g.edges.size();
            bursts += g.bursts.size();
        }
        nlohmann::json j;
        j["graphs"] = gs->graphs.size();
        j["nodes"] = nodes;
        j["edges"] = edges;
        j["bursts"] = bursts;
        *json_out = dup_string(j.dump());
    });
}

trgkit_status trgkit_graphs_labels(const trgkit_graphset* gs, char** json_out) {
    return guarded([&] {
        require(gs && json_out, "graphset/out must be non-NULL");
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& g : gs->graphs) arr.push_back(g.label());
        *json_out = dup_string(arr.dump());
    });
}

size_t trgkit_graphs_count(const trgkit_graphset* gs) { return gs ? gs->graphs.size() : 0; }

void trgkit_graphset_free(trgkit_graphset* gs) { delete gs; }

trgkit_status trgkit_align_train(const trgkit_graphset* gs, const char* config_json,
                                 trgkit_params** out) {
    return guarded([&] {
        require(gs && out, "graphset/out must be non-NULL");
        auto cfg = parse_config(config_json);
        auto res = trgkit::train_projector(gs->graphs, cfg.align, cfg.optimizer, cfg.seed);
        auto p = std::make_unique<trgkit_params>();
        p->params = std::move(res.params);
        p->align_trace = std::move(res.align_trace);
        p->seed = cfg.seed;
        *out = p.release();
    });
}

trgkit_status trgkit_task_train(trgkit_params* params, const trgkit_graphset* gs,
                                const char* config_json) {
    return guarded([&] {
        require(params && gs, "params/graphset must be non-NULL");
        auto cfg = parse_config(config_json);
        params->task_trace.clear();
        trgkit::train_task_head(params->params, gs->graphs, cfg.optimizer, cfg.seed,
                                &params->task_trace);
    });
}

trgkit_status trgkit_params_save(const trgkit_params* params, const char* path,
                                 const char* meta_json) {
    return guarded([&] {
        require(params && path, "params/path must be non-NULL");
        std::string doc = trgkit::params_to_json(params->params, params->seed,
                                                 params->align_trace, params->task_trace);
        if (meta_json && *meta_json) {
            nlohmann::json j = nlohmann::json::parse(doc);
            j["meta"] = nlohmann::json::parse(meta_json);
            doc = j.dump(2) + "\n";
        }
        trgkit::write_text_file(path, doc);
    });
}

trgkit_status trgkit_params_load(const char* path, trgkit_params** out) {
    return guarded([&] {
        require(path && out, "path/out must be non-NULL");
        auto ck = trgkit::params_from_json(trgkit::read_text_file(path));
        auto p = std::make_unique<trgkit_params>();
        p->params = std::move(ck.params);
        p->seed = ck.seed;
        p->align_trace = std::move(ck.align_trace);
        p->task_trace = std::move(ck.task_trace);
        *out = p.release();
    });
}

trgkit_status trgkit_params_info(const trgkit_params* params, char** json_out) {
    return guarded([&] {
        require(params && json_out, "params/out must be non-NULL");
        nlohmann::json j;
        j["classes"] = params->params.classes;
        j["align_trace"] = params->align_trace;
        j["task_trace"] = params->task_trace;
        j["seed"] = params->seed;
        *json_out = dup_string(j.dump());
    });
}

trgkit_status trgkit_classify(const trgkit_params* params, const trgkit_graphset* gs,
                              size_t index, char** json_out) {
    return guarded([&] {
        require(params && gs && json_out, "params/graphset/out must be non-NULL");
        if (index >= gs->graphs.size())
            throw trgkit::Error(trgkit::errc::input, "BadIndex",
                                "graph index " + std::to_string(index) + " of " +
                                    std::to_string(gs->graphs.size()));
        auto cls = trgkit::surrogate_classify(params->params, gs->graphs[index]);
        nlohmann::json scores;
        for (size_t i = 0; i < params->params.classes.size(); ++i)
            scores[params->params.classes[i]] = cls.scores[i];
        nlohmann::json j;
        j["label"] = cls.label;
        j["scores"] = scores;
        *json_out = dup_string(j.dump());
    });
}

void trgkit_params_free(trgkit_params* params) { delete params; }

trgkit_status trgkit_instr_generate(const trgkit_graphset* gs, const char* config_json,
                                    const char* out_jsonl, const char* meta_json,
                                    size_t* n_samples) {
    return guarded([&] {
        require(gs && out_jsonl, "graphset/out must be non-NULL");
        auto cfg = parse_config(config_json);
        auto samples = trgkit::generate_instruction_samples(gs->graphs, cfg.instr, cfg.seed);
        std::string out;
        if (meta_json && *meta_json) {
            nlohmann::json m;
            m["meta"] = nlohmann::json::parse(meta_json);
            out += m.dump() + "\n";
        }
        for (const auto& s : samples) out += trgkit::sample_to_jsonl(s) + "\n";
        trgkit::write_text_file(out_jsonl, out);
        if (n_samples) *n_samples = samples.size();
    });
}

trgkit_status trgkit_pool_load(const char* jsonl_path, trgkit_pool** out) {
    return guarded([&] {
        require(jsonl_path && out, "path/out must be non-NULL");
        auto p = std::make_unique<trgkit_pool>();
        p->pool = trgkit::load_pool_jsonl(jsonl_path);
        *out = p.release();
    });
}

trgkit_status trgkit_pool_from_pcap_map(const char* map_json_path, const char* config_json,
                                        trgkit_pool** out) {
    return guarded([&] {
        require(map_json_path && out, "path/out must be non-NULL");
        auto p = std::make_unique<trgkit_pool>();
        p->pool = trgkit::pool_from_pcap_map(map_json_path, parse_config(config_json));
        *out = p.release();
    });
}

size_t trgkit_pool_count(const trgkit_pool* pool) { return pool ? pool->pool.items.size() : 0; }

void trgkit_pool_free(trgkit_pool* pool) { delete pool; }

trgkit_status trgkit_split_build(const trgkit_pool* pool, const char* config_json,
                                 trgkit_split** out) {
    return guarded([&] {
        require(pool && out, "pool/out must be non-NULL");
        auto s = std::make_unique<trgkit_split>();
        s->split = trgkit::build_split(pool->pool, parse_config(config_json));
        *out = s.release();
    });
}

trgkit_status trgkit_split_save(const trgkit_split* split, const char* path,
                                const char* meta_json) {
    return guarded([&] {
        require(split && path, "split/path must be non-NULL");
        std::string doc = trgkit::split_to_json(split->split);
        if (meta_json && *meta_json) {
            nlohmann::json j = nlohmann::json::parse(doc);
            j["meta"] = nlohmann::json::parse(meta_json);
            doc = j.dump(2) + "\n";
        }
        trgkit::write_text_file(path, doc);
    });
}

trgkit_status trgkit_split_load(const char* path, trgkit_split** out) {
    return guarded([&] {
        require(path && out, "path/out must be non-NULL");
        auto s = std::make_unique<trgkit_split>();
        s->split = trgkit::split_from_json(trgkit::read_text_file(path));
        *out = s.release();
    });
}

void trgkit_split_free(trgkit_split* split) { delete split; }

trgkit_status trgkit_ni_report(const trgkit_pool* pool, const trgkit_split* split,
                               char** json_out) {
    return guarded([&] {
        require(pool && split && json_out, "pool/split/out must be non-NULL");
        auto per_class =
            trgkit::ni_report(pool->pool, split->split, trgkit::identity_extractor());
        double mean = 0.0;
        for (const auto& [name, ni] : per_class) mean += ni;
        if (!per_class.empty()) mean /= static_cast<double>(per_class.size());
        nlohmann::json j;
        j["classes"] = per_class;
        j["mean_ni"] = mean;
        *json_out = dup_string(j.dump());
    });
}

trgkit_status trgkit_count_subsets(uint64_t n_components, uint64_t* train_count,
                                   uint64_t* test_count) {
    return guarded([&] {
        require(train_count && test_count, "outputs must be non-NULL");
        auto [tr, te] = trgkit::count_subsets(n_components);
        *train_count = tr;
        *test_count = te;
    });
}

trgkit_status trgkit_eval_files(const char* preds_jsonl, const char* truths_jsonl,
                                char** report_json, char** report_text) {
    return guarded([&] {
        require(preds_jsonl && truths_jsonl, "paths must be non-NULL");
        auto report = trgkit::evaluate_files(preds_jsonl, truths_jsonl);
        if (report_json) *report_json = dup_string(trgkit::report_to_json(report));
        if (report_text) *report_text = dup_string(trgkit::report_to_text(report));
    });
}

}  // extern "C"
