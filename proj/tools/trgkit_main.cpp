// trgkit command line: pcap -> flows -> traffic relation graphs -> alignment
// training -> instruction data -> O.O.D. splits -> evaluation. All pipeline
// work goes through the shared C API; this file only handles flags and files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trgkit/trgkit.h"

namespace {

using nlohmann::json;

class CString {
public:
    CString() = default;
    ~CString() { trgkit_string_free(s_); }
    char** out() { return &s_; }
    const char* get() const { return s_ ? s_ : ""; }
    json as_json() const { return json::parse(get()); }

private:
    char* s_ = nullptr;
};

struct CliError {
    int code;
    std::string message;
};

void check(trgkit_status st) {
    if (st != TRGKIT_OK) throw CliError{static_cast<int>(st), trgkit_last_error()};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{3, "cannot open " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{3, "cannot write " + path};
    out << content;
}

// merged config document: defaults <- config file <- command-line flags
struct ConfigBuilder {
    json doc = json::object();

    void load_file(const std::string& path) {
        try {
            doc = json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw CliError{2, std::string("config is not valid JSON: ") + e.what()};
        }
        if (!doc.is_object()) throw CliError{2, "config must be a JSON object"};
    }

    template <typename T>
    void set(std::initializer_list<const char*> path, const T& value) {
        json* node = &doc;
        auto it = path.begin();
        for (size_t i = 0; i + 1 < path.size(); ++i, ++it) node = &(*node)[*it];
        (*node)[*it] = value;
    }

    // strict validation + defaults via the library
    std::string resolve() const {
        CString resolved;
        check(trgkit_config_resolve(doc.dump().c_str(), resolved.out()));
        return resolved.get();
    }
};

json make_meta(const std::string& command, const std::string& resolved_config) {
    json cfg = json::parse(resolved_config);
    json meta;
    meta["tool_version"] = trgkit_version();
    meta["command"] = command;
    meta["seed"] = cfg.at("seed");
    meta["config"] = cfg;
    return meta;
}

struct FlowsetHandle {
    trgkit_flowset* p = nullptr;
    ~FlowsetHandle() { trgkit_flowset_free(p); }
};
struct GraphsetHandle {
    trgkit_graphset* p = nullptr;
    ~GraphsetHandle() { trgkit_graphset_free(p); }
};
struct ParamsHandle {
    trgkit_params* p = nullptr;
    ~ParamsHandle() { trgkit_params_free(p); }
};
struct PoolHandle {
    trgkit_pool* p = nullptr;
    ~PoolHandle() { trgkit_pool_free(p); }
};
struct SplitHandle {
    trgkit_split* p = nullptr;
    ~SplitHandle() { trgkit_split_free(p); }
};

std::vector<const char*> c_paths(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
}

void load_graph_files(const std::vector<std::string>& files, GraphsetHandle& gs) {
    for (size_t i = 0; i < files.size(); ++i) {
        if (i == 0) {
            check(trgkit_graphs_load(files[i].c_str(), &gs.p));
        } else {
            GraphsetHandle more;
            check(trgkit_graphs_load(files[i].c_str(), &more.p));
            check(trgkit_graphs_merge(gs.p, more.p));
        }
    }
}

int run(int argc, char** argv) {
    CLI::App app{"traffic relation graph toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // frees -h for the hop-depth flag
    app.set_version_flag("--version", trgkit_version());

    // shared state filled by flag callbacks
    std::string config_path, out_path;
    bool have_seed = false;
    uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "pipeline config JSON file");
        cmd->add_option("--seed", seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--out", out_path, "output path");
    };

    // flows
    auto* flows = app.add_subcommand("flows", "parse pcaps into feature-extracted flows");
    std::vector<std::string> flow_inputs;
    std::string packets_out, label, label_map_path;
    int64_t idle_timeout = 0;
    uint32_t rd_max_bytes = 0, pl_max_packets = 0, min_payload_len = 0;
    std::vector<std::string> protocols;
    add_common(flows);
    flows->add_option("pcaps", flow_inputs, "input pcap files")->required();
    flows->add_option("--packets-out", packets_out, "also dump parsed packets as JSONL");
    flows->add_option("--label", label, "class label applied to every flow");
    flows->add_option("--label-map", label_map_path, "JSON {pcap path: label}");
    auto* o_idle = flows->add_option("--idle-timeout-micros", idle_timeout);
    auto* o_rdmax = flows->add_option("--rd-max-bytes", rd_max_bytes);
    auto* o_plmax = flows->add_option("--pl-max-packets", pl_max_packets);
    auto* o_minlen = flows->add_option("--min-payload-len", min_payload_len);
    auto* o_protos = flows->add_option("--protocols", protocols, "keep only these protocols");

    // graph
    auto* graph = app.add_subcommand("graph", "build traffic relation graphs from flows");
    std::string graph_in;
    int64_t gamma = 0, window = 0;
    add_common(graph);
    graph->add_option("--in", graph_in, "flow JSONL")->required();
    auto* o_gamma = graph->add_option("--gamma-micros", gamma, "BURST threshold");
    auto* o_window = graph->add_option("--window-micros", window, "one graph per window");

    // train-align
    auto* train = app.add_subcommand("train-align", "train the alignment projector");
    std::vector<std::string> train_inputs;
    std::string task_head = "auto";
    double lr = 0, tau = 0, lambda_rd = 0, lambda_pl = 0;
    int epochs = 0, batch = 0, proj_dim = 0, graph_dim = 0, rd_dim = 0, pl_dim = 0, rounds = -1;
    add_common(train);
    train->add_option("--in", train_inputs, "graph JSON files")->required();
    train->add_option("--task-head", task_head, "auto|on|off (fit the surrogate head)")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    auto* o_lr = train->add_option("--lr", lr);
    auto* o_epochs = train->add_option("--epochs", epochs);
    auto* o_batch = train->add_option("--batch", batch);
    auto* o_tau = train->add_option("--tau", tau);
    auto* o_lrd = train->add_option("--lambda-rd", lambda_rd);
    auto* o_lpl = train->add_option("--lambda-pl", lambda_pl);
    auto* o_proj = train->add_option("--proj-dim", proj_dim);
    auto* o_gdim = train->add_option("--graph-dim", graph_dim);
    auto* o_rdim = train->add_option("--rd-dim", rd_dim);
    auto* o_pdim = train->add_option("--pl-dim", pl_dim);
    auto* o_rounds = train->add_option("--rounds", rounds);

    // instr-gen
    auto* instr = app.add_subcommand("instr-gen", "emit instruction-tuning samples");
    std::vector<std::string> instr_inputs;
    int hop = -1, fanout = 0, rd_preview = -1, pl_preview = -1;
    std::string kind;
    add_common(instr);
    instr->add_option("--in", instr_inputs, "graph JSON files")->required();
    auto* o_h = instr->add_option("--h", hop, "subgraph hop depth");
    auto* o_fanout = instr->add_option("--fanout", fanout);
    auto* o_kind = instr->add_option("--kind", kind)
                       ->check(CLI::IsMember({"graph_matching", "traffic_task", "both"}));
    auto* o_rdprev = instr->add_option("--rd-preview", rd_preview);
    auto* o_plprev = instr->add_option("--pl-preview", pl_preview);

    // ood-build
    auto* ood = app.add_subcommand("ood-build", "build a distribution-shifted split");
    std::string pool_path, pcap_map_path, bias, ratio_train, ratio_test;
    int per_class_n = 0;
    double train_fraction = 0, holdout_fraction = 0;
    add_common(ood);
    auto* o_pool = ood->add_option("--pool", pool_path, "pool JSONL");
    auto* o_map = ood->add_option("--pcap-map", pcap_map_path,
                                  "JSON array of {path, class, component}");
    auto* o_bias = ood->add_option("--bias", bias)
                       ->check(CLI::IsMember({"none", "proportional", "compositional"}));
    auto* o_rt = ood->add_option("--ratio-train", ratio_train, "dominant ratio, e.g. 1:3");
    auto* o_rs = ood->add_option("--ratio-test", ratio_test);
    auto* o_pcn = ood->add_option("--per-class-n", per_class_n);
    auto* o_tf = ood->add_option("--train-fraction", train_fraction);
    auto* o_hf = ood->add_option("--holdout-fraction", holdout_fraction);
    (void)o_pool;
    (void)o_map;

    // ni
    auto* ni = app.add_subcommand("ni", "Non-I.I.D. index report for a split");
    std::string ni_pool_path, ni_split_path;
    add_common(ni);
    ni->add_option("--pool", ni_pool_path, "pool JSONL")->required();
    ni->add_option("--split", ni_split_path, "split manifest JSON")->required();

    // classify
    auto* classify = app.add_subcommand("classify", "label graphs with the surrogate head");
    std::vector<std::string> classify_inputs;
    std::string params_path, truths_out;
    add_common(classify);
    classify->add_option("--in", classify_inputs, "graph JSON files")->required();
    classify->add_option("--params", params_path, "trained checkpoint")->required();
    classify->add_option("--truths-out", truths_out, "also write ground-truth labels");

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against truths");
    std::string preds_path, truths_path;
    add_common(eval);
    eval->add_option("--preds", preds_path, "predictions JSONL")->required();
    eval->add_option("--truths", truths_path, "truths JSONL")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ConfigBuilder cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        if (have_seed) cfg.set({"seed"}, seed);

        if (*flows) {
            if (out_path.empty()) throw CliError{2, "flows requires --out"};
            if (*o_idle) cfg.set({"idle_timeout_micros"}, idle_timeout);
            if (*o_rdmax) cfg.set({"rd_max_bytes"}, rd_max_bytes);
            if (*o_plmax) cfg.set({"pl_max_packets"}, pl_max_packets);
            if (*o_minlen) cfg.set({"filter", "min_payload_len"}, min_payload_len);
            if (*o_protos) cfg.set({"filter", "protocols"}, protocols);
            std::string resolved = cfg.resolve();
            json meta = make_meta("flows", resolved);

            FlowsetHandle fs;
            auto paths = c_paths(flow_inputs);
            check(trgkit_flows_build(paths.data(), paths.size(), resolved.c_str(), &fs.p));
            if (!label.empty()) check(trgkit_flows_set_label(fs.p, nullptr, label.c_str()));
            if (!label_map_path.empty()) {
                json map = json::parse(read_file(label_map_path));
                for (auto it = map.begin(); it != map.end(); ++it)
                    check(trgkit_flows_set_label(fs.p, it.key().c_str(),
                                                 it.value().get<std::string>().c_str()));
            }
            check(trgkit_flows_save(fs.p, out_path.c_str(), meta.dump().c_str()));
            if (!packets_out.empty())
                check(trgkit_packets_dump(paths.data(), paths.size(), resolved.c_str(),
                                          packets_out.c_str(), meta.dump().c_str()));
            CString summary;
            check(trgkit_flows_summary(fs.p, summary.out()));
            std::cout << summary.get() << "\n";
            return 0;
        }

        if (*graph) {
            if (out_path.empty()) throw CliError{2, "graph requires --out"};
            if (*o_gamma) cfg.set({"gamma_micros"}, gamma);
            if (*o_window) cfg.set({"window_micros"}, window);
            std::string resolved = cfg.resolve();
            json meta = make_meta("graph", resolved);

            FlowsetHandle fs;
            check(trgkit_flows_load(graph_in.c_str(), &fs.p));
            GraphsetHandle gs;
            check(trgkit_graphs_build(fs.p, resolved.c_str(), &gs.p));
            check(trgkit_graphs_save(gs.p, out_path.c_str(), meta.dump().c_str()));
            CString stats;
            check(trgkit_graphs_stats(gs.p, stats.out()));
            std::cout << stats.get() << "\n";
            return 0;
        }

        if (*train) {
            if (out_path.empty()) throw CliError{2, "train-align requires --out"};
            if (*o_lr) cfg.set({"align", "optimizer", "lr"}, lr);
            if (*o_epochs) cfg.set({"align", "optimizer", "epochs"}, epochs);
            if (*o_batch) cfg.set({"align", "optimizer", "batch"}, batch);
            if (*o_tau) cfg.set({"align", "tau"}, tau);
            if (*o_lrd) cfg.set({"align", "lambda_rd"}, lambda_rd);
            if (*o_lpl) cfg.set({"align", "lambda_pl"}, lambda_pl);
            if (*o_proj) cfg.set({"align", "proj_dim"}, proj_dim);
            if (*o_gdim) cfg.set({"align", "graph_dim"}, graph_dim);
            if (*o_rdim) cfg.set({"align", "rd_dim"}, rd_dim);
            if (*o_pdim) cfg.set({"align", "pl_dim"}, pl_dim);
            if (*o_rounds) cfg.set({"align", "rounds"}, rounds);
            std::string resolved = cfg.resolve();
            json meta = make_meta("train-align", resolved);

            GraphsetHandle gs;
            load_graph_files(train_inputs, gs);
            ParamsHandle params;
            check(trgkit_align_train(gs.p, resolved.c_str(), &params.p));
            if (task_head != "off") {
                trgkit_status st = trgkit_task_train(params.p, gs.p, resolved.c_str());
                if (st != TRGKIT_OK) {
                    std::string err = trgkit_last_error();
                    bool no_labels = err.find("NoLabels") != std::string::npos;
                    if (!(task_head == "auto" && no_labels))
                        throw CliError{static_cast<int>(st), err};
                }
            }
            check(trgkit_params_save(params.p, out_path.c_str(), meta.dump().c_str()));
            CString info;
            check(trgkit_params_info(params.p, info.out()));
            std::cout << info.get() << "\n";
            return 0;
        }

        if (*instr) {
            if (out_path.empty()) throw CliError{2, "instr-gen requires --out"};
            if (*o_h) cfg.set({"instr", "h"}, hop);
            if (*o_fanout) cfg.set({"instr", "fanout"}, fanout);
            if (*o_kind) cfg.set({"instr", "kind"}, kind);
            if (*o_rdprev) cfg.set({"instr", "rd_preview"}, rd_preview);
            if (*o_plprev) cfg.set({"instr", "pl_preview"}, pl_preview);
            std::string resolved = cfg.resolve();
            json meta = make_meta("instr-gen", resolved);

            GraphsetHandle gs;
            load_graph_files(instr_inputs, gs);
            size_t n = 0;
            check(trgkit_instr_generate(gs.p, resolved.c_str(), out_path.c_str(),
                                        meta.dump().c_str(), &n));
            std::cout << json{{"samples", n}}.dump() << "\n";
            return 0;
        }

        if (*ood) {
            if (out_path.empty()) throw CliError{2, "ood-build requires --out"};
            if (pool_path.empty() == pcap_map_path.empty())
                throw CliError{2, "ood-build needs exactly one of --pool or --pcap-map"};
            if (*o_bias) cfg.set({"ood", "bias"}, bias);
            if (*o_rt) cfg.set({"ood", "ratio_train"}, ratio_train);
            if (*o_rs) cfg.set({"ood", "ratio_test"}, ratio_test);
            if (*o_pcn) cfg.set({"ood", "per_class_n"}, per_class_n);
            if (*o_tf) cfg.set({"ood", "train_fraction"}, train_fraction);
            if (*o_hf) cfg.set({"ood", "holdout_fraction"}, holdout_fraction);
            std::string resolved = cfg.resolve();
            json meta = make_meta("ood-build", resolved);

            PoolHandle pool;
            if (!pool_path.empty())
                check(trgkit_pool_load(pool_path.c_str(), &pool.p));
            else
                check(trgkit_pool_from_pcap_map(pcap_map_path.c_str(), resolved.c_str(), &pool.p));
            SplitHandle split;
            check(trgkit_split_build(pool.p, resolved.c_str(), &split.p));
            check(trgkit_split_save(split.p, out_path.c_str(), meta.dump().c_str()));
            CString report;
            check(trgkit_ni_report(pool.p, split.p, report.out()));
            std::cout << report.get() << "\n";
            return 0;
        }

        if (*ni) {
            std::string resolved = cfg.resolve();
            json meta = make_meta("ni", resolved);
            PoolHandle pool;
            check(trgkit_pool_load(ni_pool_path.c_str(), &pool.p));
            SplitHandle split;
            check(trgkit_split_load(ni_split_path.c_str(), &split.p));
            CString report;
            check(trgkit_ni_report(pool.p, split.p, report.out()));
            if (!out_path.empty()) {
                json doc = json::parse(report.get());
                doc["meta"] = meta;
                write_file(out_path, doc.dump(2) + "\n");
            }
            std::cout << report.get() << "\n";
            return 0;
        }

        if (*classify) {
            if (out_path.empty()) throw CliError{2, "classify requires --out"};
            std::string resolved = cfg.resolve();
            json meta = make_meta("classify", resolved);

            GraphsetHandle gs;
            load_graph_files(classify_inputs, gs);
            ParamsHandle params;
            check(trgkit_params_load(params_path.c_str(), &params.p));

            std::string preds;
            preds += json{{"meta", meta}}.dump() + "\n";
            size_t n = trgkit_graphs_count(gs.p);
            for (size_t i = 0; i < n; ++i) {
                CString result;
                check(trgkit_classify(params.p, gs.p, i, result.out()));
                json r = result.as_json();
                preds += json{{"sample_id", "g" + std::to_string(i)}, {"label", r.at("label")}}
                             .dump() +
                         "\n";
            }
            write_file(out_path, preds);
            if (!truths_out.empty()) {
                CString labels;
                check(trgkit_graphs_labels(gs.p, labels.out()));
                json arr = labels.as_json();
                std::string truths = json{{"meta", meta}}.dump() + "\n";
                for (size_t i = 0; i < arr.size(); ++i) {
                    if (arr[i].get<std::string>().empty()) continue;
                    truths += json{{"sample_id", "g" + std::to_string(i)}, {"label", arr[i]}}
                                  .dump() +
                              "\n";
                }
                write_file(truths_out, truths);
            }
            std::cout << json{{"predictions", n}}.dump() << "\n";
            return 0;
        }

        if (*eval) {
            std::string resolved = cfg.resolve();
            json meta = make_meta("eval", resolved);
            CString report_json, report_text;
            check(trgkit_eval_files(preds_path.c_str(), truths_path.c_str(), report_json.out(),
                                    report_text.out()));
            if (!out_path.empty()) {
                json doc = json::parse(report_json.get());
                doc["meta"] = meta;
                write_file(out_path, doc.dump(2) + "\n");
            }
            std::cout << report_text.get();
            return 0;
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
