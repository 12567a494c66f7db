#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trgkit/trg.hpp"

namespace trgkit {

// h-hop sampled neighborhood of one graph; node entries are indices into the
// parent graph's node order, center first.
struct Subgraph {
    const TrafficRelationGraph* parent = nullptr;
    std::vector<uint32_t> nodes;
    std::vector<int> hop;          // per nodes entry
    std::vector<Edge> edges;       // exactly the parent edges between included nodes

    size_t size() const { return nodes.size(); }
    const Flow& flow(size_t i) const { return parent->flows[nodes[i]]; }
};

// BFS from center keeping at most `fanout` seeded-uniform new neighbors per
// frontier node, to depth h. Deterministic; monotone in h and fanout.
Subgraph sample_subgraph(const TrafficRelationGraph& g, size_t center, int h, int fanout,
                         uint64_t seed);

// The whole graph viewed as a subgraph (used by task samples).
Subgraph full_subgraph(const TrafficRelationGraph& g);

enum class SampleKind { graph_matching, traffic_task };

struct InstructionSample {
    SampleKind kind = SampleKind::graph_matching;
    std::string graph_tokens;
    std::vector<std::string> feature_block;
    std::string prompt;
    std::string answer;
    // meta
    uint64_t graph_id = 0;
    uint64_t center_node = 0;  // flow id of the center
    int h = 0;
    uint64_t seed = 0;
    std::vector<uint32_t> permutation;  // 1-indexed pi; empty for task samples
};

// <graph_begin> <graph_token>_1 ... <graph_token>_n <graph_end>
std::string render_graph_tokens(const Subgraph& sub);

// one line of feature text for a flow: leading datagram tokens as hex plus
// leading signed lengths
std::string feature_text(const Flow& f, int rd_preview = 16, int pl_preview = 16);

// Self-supervised matching sample: features listed under a seeded permutation
// pi, answer maps graph position i to feature line pi^-1(i) as "i -> j" lines.
InstructionSample gen_graph_matching_sample(const Subgraph& sub, uint64_t graph_id,
                                            uint64_t seed, int rd_preview = 16,
                                            int pl_preview = 16);

InstructionSample gen_task_sample(const Subgraph& sub, const std::string& label,
                                  uint64_t graph_id, uint64_t seed, int rd_preview = 16,
                                  int pl_preview = 16);

std::string sample_to_jsonl(const InstructionSample& s);

struct InstrOptions {
    int h = 2;
    int fanout = 5;
    std::string kind = "graph_matching";  // graph_matching | traffic_task | both
    int rd_preview = 16;
    int pl_preview = 16;
};

// matching: one sample per (graph, center node); task: one per graph.
std::vector<InstructionSample> generate_instruction_samples(
    const std::vector<TrafficRelationGraph>& graphs, const InstrOptions& opts, uint64_t seed);

}  // namespace trgkit
