#include "trgkit/instr.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "json.hpp"

namespace trgkit {

namespace {

constexpr uint64_t kNeighborSalt = 0x7452474b6e626873ULL;
constexpr uint64_t kPermSalt = 0x7452474b7065726dULL;

const char* kMatchingPrompt =
    "The traffic relation graph above is rendered as graph tokens in graph order. "
    "The flow feature lines below are shuffled. Match each graph token position to "
    "the feature line that describes the same flow. Reply with lines of the form "
    "'i -> j', one per graph position i.";

const char* kTaskPrompt =
    "Given the traffic relation graph rendered as graph tokens above and the flow "
    "feature lines below, identify the traffic class of this session. Reply with "
    "the class name only.";

void collect_induced_edges(const TrafficRelationGraph& g, Subgraph& sub) {
    std::set<uint64_t> ids;
    for (uint32_t ni : sub.nodes) ids.insert(g.flows[ni].id);
    for (const auto& e : g.edges)
        if (ids.count(e.src) && ids.count(e.dst)) sub.edges.push_back(e);
}

}  // namespace

Subgraph sample_subgraph(const TrafficRelationGraph& g, size_t center, int h, int fanout,
                         uint64_t seed) {
    if (center >= g.node_count())
        throw Error(errc::input, "UnknownNode",
                    "center " + std::to_string(center) + " of " +
                        std::to_string(g.node_count()) + " nodes");
    if (h < 0) throw Error(errc::config, "BadHop", "h must be >= 0");
    if (fanout < 1) throw Error(errc::config, "BadFanout", "fanout must be >= 1");

    auto neighbors = g.neighbor_lists();
    Subgraph sub;
    sub.parent = &g;
    sub.nodes.push_back(static_cast<uint32_t>(center));
    sub.hop.push_back(0);

    std::vector<bool> included(g.node_count(), false);
    included[center] = true;

    std::vector<uint32_t> frontier{static_cast<uint32_t>(center)};
    for (int depth = 1; depth <= h && !frontier.empty(); ++depth) {
        std::vector<uint32_t> next;
        std::sort(frontier.begin(), frontier.end());
        for (uint32_t u : frontier) {
            // per-node stream keyed by flow id: fanout/h growth stays monotone
            DetRng rng(hash_combine(hash_combine(seed, kNeighborSalt), g.flows[u].id));
            std::vector<uint32_t> order = neighbors[u];
            rng.shuffle(order);
            int taken = 0;
            for (uint32_t v : order) {
                if (taken >= fanout) break;
                if (included[v]) continue;
                included[v] = true;
                sub.nodes.push_back(v);
                sub.hop.push_back(depth);
                next.push_back(v);
                ++taken;
            }
        }
        frontier = std::move(next);
    }
    collect_induced_edges(g, sub);
    return sub;
}

Subgraph full_subgraph(const TrafficRelationGraph& g) {
    Subgraph sub;
    sub.parent = &g;
    sub.nodes.resize(g.node_count());
    std::iota(sub.nodes.begin(), sub.nodes.end(), 0u);
    sub.hop.assign(g.node_count(), 0);
    sub.edges = g.edges;
    return sub;
}

std::string render_graph_tokens(const Subgraph& sub) {
    std::string out = "<graph_begin>";
    for (size_t i = 1; i <= sub.size(); ++i)
        out += " <graph_token>_" + std::to_string(i);
    out += " <graph_end>";
    return out;
}

std::string feature_text(const Flow& f, int rd_preview, int pl_preview) {
    std::string out = "tokens=[";
    size_t nt = std::min<size_t>(f.datagram_tokens.size(), static_cast<size_t>(rd_preview));
    for (size_t i = 0; i < nt; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%04x", f.datagram_tokens[i]);
        if (i) out += ",";
        out += buf;
    }
    out += "] lengths=[";
    size_t nl = std::min<size_t>(f.directed_lengths.size(), static_cast<size_t>(pl_preview));
    for (size_t i = 0; i < nl; ++i) {
        if (i) out += ",";
        int32_t l = f.directed_lengths[i];
        out += (l < 0 ? "-" : "+") + std::to_string(l < 0 ? -static_cast<int64_t>(l) : l);
    }
    out += "]";
    return out;
}

InstructionSample gen_graph_matching_sample(const Subgraph& sub, uint64_t graph_id,
                                            uint64_t seed, int rd_preview, int pl_preview) {
    if (sub.size() == 0)
        throw Error(errc::input, "EmptyGraph", "matching sample needs at least one node");
    size_t n = sub.size();

    // pi(j) = graph position whose features appear at feature line j
    std::vector<uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 1u);
    DetRng rng(hash_combine(hash_combine(seed, kPermSalt), sub.flow(0).id));
    rng.shuffle(pi);

    InstructionSample s;
    s.kind = SampleKind::graph_matching;
    s.graph_tokens = render_graph_tokens(sub);
    s.feature_block.reserve(n);
    for (size_t j = 0; j < n; ++j)
        s.feature_block.push_back(feature_text(sub.flow(pi[j] - 1), rd_preview, pl_preview));
    s.prompt = kMatchingPrompt;

    std::vector<uint32_t> inverse(n + 1, 0);
    for (size_t j = 0; j < n; ++j) inverse[pi[j]] = static_cast<uint32_t>(j + 1);
    for (size_t i = 1; i <= n; ++i) {
        if (i > 1) s.answer += "\n";
        s.answer += std::to_string(i) + " -> " + std::to_string(inverse[i]);
    }

    s.graph_id = graph_id;
    s.center_node = sub.flow(0).id;
    s.h = sub.hop.empty() ? 0 : *std::max_element(sub.hop.begin(), sub.hop.end());
    s.seed = seed;
    s.permutation = pi;
    return s;
}

InstructionSample gen_task_sample(const Subgraph& sub, const std::string& label,
                                  uint64_t graph_id, uint64_t seed, int rd_preview,
                                  int pl_preview) {
    if (label.empty())
        throw Error(errc::input, "UnlabeledGraph", "task sample needs a non-empty label");
    InstructionSample s;
    s.kind = SampleKind::traffic_task;
    s.graph_tokens = render_graph_tokens(sub);
    for (size_t i = 0; i < sub.size(); ++i)
        s.feature_block.push_back(feature_text(sub.flow(i), rd_preview, pl_preview));
    s.prompt = kTaskPrompt;
    s.answer = label;
    s.graph_id = graph_id;
    s.center_node = sub.size() ? sub.flow(0).id : 0;
    s.h = 0;
    s.seed = seed;
    return s;
}

std::string sample_to_jsonl(const InstructionSample& s) {
    nlohmann::json j;
    j["kind"] = s.kind == SampleKind::graph_matching ? "graph_matching" : "traffic_task";
    j["graph_tokens"] = s.graph_tokens;
    j["feature_block"] = s.feature_block;
    j["prompt"] = s.prompt;
    j["answer"] = s.answer;
    j["meta"] = {
        {"graph_id", s.graph_id}, {"center_node", s.center_node}, {"h", s.h},
        {"seed", s.seed},         {"permutation", s.permutation},
    };
    return j.dump();
}

std::vector<InstructionSample> generate_instruction_samples(
    const std::vector<TrafficRelationGraph>& graphs, const InstrOptions& opts, uint64_t seed) {
    if (opts.kind != "graph_matching" && opts.kind != "traffic_task" && opts.kind != "both")
        throw Error(errc::config, "BadSampleKind", "kind must be graph_matching, traffic_task or both");

    std::vector<InstructionSample> out;
    for (size_t gi = 0; gi < graphs.size(); ++gi) {
        const auto& g = graphs[gi];
        if (opts.kind == "graph_matching" || opts.kind == "both") {
            for (size_t c = 0; c < g.node_count(); ++c) {
                Subgraph sub = sample_subgraph(g, c, opts.h, opts.fanout, seed);
                out.push_back(gen_graph_matching_sample(sub, gi, seed, opts.rd_preview,
                                                        opts.pl_preview));
            }
        }
        if (opts.kind == "traffic_task" || opts.kind == "both") {
            std::string label = g.label();
            if (label.empty())
                throw Error(errc::input, "UnlabeledGraph",
                            "graph " + std::to_string(gi) + " carries no label");
            out.push_back(gen_task_sample(full_subgraph(g), label, gi, seed, opts.rd_preview,
                                          opts.pl_preview));
        }
    }
    return out;
}

}  // namespace trgkit
