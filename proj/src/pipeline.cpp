#include "trgkit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace trgkit {

namespace {

std::vector<uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::input, "MissingFile", "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_meta_line(const nlohmann::json& j) {
    return j.is_object() && j.size() == 1 && j.contains("meta");
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::input, "MissingFile", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::input, "WriteFailed", "cannot write " + path);
    out << content;
}

FlowSet flows_from_pcaps(const std::vector<std::string>& paths, const PipelineConfig& cfg,
                         const std::map<std::string, std::string>& label_by_source,
                         const std::string& default_label) {
    FlowSet fs;
    FilterSpec filter = cfg.filter.to_spec();
    for (const auto& path : paths) {
        ParseResult parsed = parse_capture(read_binary_file(path));
        fs.total_records += parsed.total_records;
        fs.skipped_packets += parsed.skipped;
        for (const auto& [reason, n] : parsed.skip_reasons) fs.skip_reasons[reason] += n;

        auto kept = filter_packets(parsed.records, filter);
        fs.skipped_packets += parsed.records.size() - kept.size();
        if (parsed.records.size() != kept.size())
            fs.skip_reasons["filtered"] += parsed.records.size() - kept.size();
        fs.yielded_packets += kept.size();

        std::stable_sort(kept.begin(), kept.end(),
                         [](const PacketRecord& a, const PacketRecord& b) {
                             if (a.ts_micros != b.ts_micros) return a.ts_micros < b.ts_micros;
                             return a.capture_index < b.capture_index;
                         });
        auto flows = assemble_flows(std::move(kept), cfg.idle_timeout_micros);

        auto source_id = static_cast<uint32_t>(fs.sources.size());
        fs.sources.push_back(path);
        std::string label = default_label;
        if (auto it = label_by_source.find(path); it != label_by_source.end()) label = it->second;

        for (auto& f : flows) {
            f.source_id = source_id;
            f.label = label;
            f.datagram_tokens = extract_datagram_tokens(f, cfg.rd_max_bytes);
            f.directed_lengths = extract_directed_lengths(f, cfg.pl_max_packets);
            fs.flows.push_back(std::move(f));
        }
    }
    std::sort(fs.flows.begin(), fs.flows.end(), [](const Flow& a, const Flow& b) {
        if (a.start_ts_micros != b.start_ts_micros) return a.start_ts_micros < b.start_ts_micros;
        if (a.source_id != b.source_id) return a.source_id < b.source_id;
        return a.packets.front().capture_index < b.packets.front().capture_index;
    });
    for (size_t i = 0; i < fs.flows.size(); ++i) fs.flows[i].id = i;
    return fs;
}

void save_flows_jsonl(const FlowSet& fs, const std::string& path, const std::string& meta_json) {
    std::string out;
    if (!meta_json.empty()) {
        nlohmann::json m;
        m["meta"] = nlohmann::json::parse(meta_json);
        out += m.dump() + "\n";
    }
    for (const auto& f : fs.flows) out += flow_to_jsonl(f, fs.sources) + "\n";
    write_text_file(path, out);
}

FlowSet load_flows_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::input, "MissingFile", "cannot open " + path);
    FlowSet fs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (is_meta_line(j)) continue;
        fs.flows.push_back(flow_from_jsonl(line, fs.sources));
    }
    fs.yielded_packets = 0;
    for (const auto& f : fs.flows) fs.yielded_packets += f.n_packets;
    return fs;
}

void dump_packets_jsonl(const std::vector<std::string>& pcap_paths, const PipelineConfig& cfg,
                        const std::string& out_path, const std::string& meta_json) {
    FilterSpec filter = cfg.filter.to_spec();
    std::string out;
    if (!meta_json.empty()) {
        nlohmann::json m;
        m["meta"] = nlohmann::json::parse(meta_json);
        out += m.dump() + "\n";
    }
    for (const auto& path : pcap_paths) {
        ParseResult parsed = parse_capture(read_binary_file(path));
        for (const auto& r : filter_packets(parsed.records, filter))
            out += packet_to_jsonl(r) + "\n";
    }
    write_text_file(out_path, out);
}

std::vector<TrafficRelationGraph> graphs_from_flows(FlowSet fs, const PipelineConfig& cfg) {
    return build_trgs(std::move(fs.flows), cfg.gamma_micros, cfg.window_micros);
}

namespace {

nlohmann::json graph_to_json_obj(const TrafficRelationGraph& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& f : g.flows) {
        nlohmann::json n;
        n["flow_id"] = f.id;
        if (f.label.empty())
            n["label"] = nullptr;
        else
            n["label"] = f.label;
        n["start_ts_micros"] = f.start_ts_micros;
        n["datagram_tokens"] = f.datagram_tokens;
        n["directed_lengths"] = f.directed_lengths;
        n["n_packets"] = f.n_packets;
        nodes.push_back(std::move(n));
    }
    nlohmann::json bursts = nlohmann::json::array();
    for (const auto& b : g.bursts) bursts.push_back(b.flow_ids);
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges)
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", edge_kind_name(e.kind)}});

    nlohmann::json j;
    j["gamma_micros"] = g.gamma_micros;
    j["nodes"] = nodes;
    j["bursts"] = bursts;
    j["edges"] = edges;
    return j;
}

TrafficRelationGraph graph_from_json_obj(const nlohmann::json& j) {
    TrafficRelationGraph g;
    g.gamma_micros = j.at("gamma_micros").get<int64_t>();
    for (const auto& n : j.at("nodes")) {
        Flow f;
        f.id = n.at("flow_id").get<uint64_t>();
        if (n.contains("label") && !n["label"].is_null()) f.label = n["label"].get<std::string>();
        f.start_ts_micros = n.at("start_ts_micros").get<int64_t>();
        f.datagram_tokens = n.at("datagram_tokens").get<std::vector<uint16_t>>();
        f.directed_lengths = n.at("directed_lengths").get<std::vector<int32_t>>();
        f.n_packets = n.at("n_packets").get<uint32_t>();
        g.flows.push_back(std::move(f));
    }
    for (const auto& b : j.at("bursts")) {
        Burst burst;
        burst.flow_ids = b.get<std::vector<uint64_t>>();
        if (!burst.flow_ids.empty())
            burst.start_ts_micros =
                g.flows[g.node_index(burst.flow_ids.front())].start_ts_micros;
        g.bursts.push_back(std::move(burst));
    }
    for (const auto& e : j.at("edges")) {
        Edge edge;
        edge.src = e.at("src").get<uint64_t>();
        edge.dst = e.at("dst").get<uint64_t>();
        std::string kind = e.at("kind").get<std::string>();
        edge.kind = kind == "burst" ? EdgeKind::burst : EdgeKind::adjacency;
        g.edges.push_back(edge);
    }
    return g;
}

}  // namespace

std::string graph_to_json(const TrafficRelationGraph& g) {
    return graph_to_json_obj(g).dump(2) + "\n";
}

void save_graphs_json(const std::vector<TrafficRelationGraph>& graphs, const std::string& path,
                      const std::string& meta_json) {
    nlohmann::json j;
    if (!meta_json.empty()) j["meta"] = nlohmann::json::parse(meta_json);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : graphs) arr.push_back(graph_to_json_obj(g));
    j["graphs"] = arr;
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<TrafficRelationGraph> load_graphs_json(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    std::vector<TrafficRelationGraph> out;
    if (j.is_object() && j.contains("graphs")) {
        for (const auto& g : j["graphs"]) out.push_back(graph_from_json_obj(g));
    } else if (j.is_object()) {
        out.push_back(graph_from_json_obj(j));
    } else {
        throw Error(errc::input, "BadGraphFile", "expected a graph document in " + path);
    }
    return out;
}

LabeledPool load_pool_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::input, "MissingFile", "cannot open " + path);
    LabeledPool pool;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (is_meta_line(j)) continue;
        pool.items.push_back(pool_item_from_jsonl(line));
    }
    return pool;
}

void save_pool_jsonl(const LabeledPool& pool, const std::string& path,
                     const std::string& meta_json) {
    std::string out;
    if (!meta_json.empty()) {
        nlohmann::json m;
        m["meta"] = nlohmann::json::parse(meta_json);
        out += m.dump() + "\n";
    }
    for (const auto& item : pool.items) out += pool_item_to_jsonl(item) + "\n";
    write_text_file(path, out);
}

LabeledPool pool_from_pcap_map(const std::string& map_path, const PipelineConfig& cfg) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(map_path));
    if (!j.is_array())
        throw Error(errc::input, "BadPcapMap", "mapping file must be a JSON array");

    LabeledPool pool;
    for (const auto& entry : j) {
        std::string path = entry.at("path").get<std::string>();
        std::string klass = entry.at("class").get<std::string>();
        std::string component = entry.at("component").get<std::string>();
        FlowSet fs = flows_from_pcaps({path}, cfg);
        for (const auto& f : fs.flows) {
            PoolItem item;
            item.sample_id = path + "#" + std::to_string(f.id);
            item.klass = klass;
            item.component = component;
            item.features = default_flow_features(f);
            pool.items.push_back(std::move(item));
        }
    }
    return pool;
}

DatasetSplit build_split(const LabeledPool& pool, const PipelineConfig& cfg) {
    BiasKind kind = bias_kind_parse(cfg.ood.bias);
    switch (kind) {
        case BiasKind::none:
            return build_random_split(pool, cfg.ood.train_fraction, cfg.seed);
        case BiasKind::proportional: {
            if (cfg.ood.per_class_n <= 0)
                throw Error(errc::config, "BadConfig",
                            "ood.per_class_n: must be > 0 for proportional bias");
            return build_proportional_split(pool, Ratio::parse(cfg.ood.ratio_train),
                                            Ratio::parse(cfg.ood.ratio_test),
                                            cfg.ood.per_class_n, cfg.seed);
        }
        case BiasKind::compositional:
            return build_compositional_split(pool, cfg.ood.train_fraction,
                                             cfg.ood.holdout_fraction, cfg.seed);
    }
    throw Error(errc::internal, "Unreachable", "unknown bias kind");
}

}  // namespace trgkit
