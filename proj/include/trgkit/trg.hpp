#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trgkit/flow.hpp"

namespace trgkit {

struct Burst {
    std::vector<uint64_t> flow_ids;  // ordered by start time
    int64_t start_ts_micros = 0;     // first member's start
};

enum class EdgeKind : uint8_t { burst, adjacency };

inline const char* edge_kind_name(EdgeKind k) {
    return k == EdgeKind::burst ? "burst" : "adjacency";
}

// Undirected kind-tagged pair of flow ids; src is the earlier node.
struct Edge {
    uint64_t src = 0;
    uint64_t dst = 0;
    EdgeKind kind = EdgeKind::burst;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct TrafficRelationGraph {
    int64_t gamma_micros = 0;
    std::vector<Flow> flows;  // node order = start-time order; node i == flows[i]
    std::vector<Burst> bursts;
    std::vector<Edge> edges;

    size_t node_count() const { return flows.size(); }
    size_t node_index(uint64_t flow_id) const;  // throws UnknownNode

    // symmetric 0/1 adjacency over nodes in start-time order, zero diagonal
    std::vector<std::vector<uint8_t>> adjacency_matrix() const;
    std::vector<std::vector<uint32_t>> neighbor_lists() const;

    // consensus over node labels; empty when no node is labeled
    std::string label() const;
};

// Flow-level BURST segmentation: a flow joins the current burst iff its start
// is within gamma of the most recently appended flow's start (chained rule).
std::vector<Burst> segment_bursts(const std::vector<Flow>& flows, int64_t gamma_micros);

// Traffic relation graph: chain edges inside each burst, adjacency edges from
// the last flow of a burst to the first and last flows of the next burst.
TrafficRelationGraph build_trg(std::vector<Flow> flows, int64_t gamma_micros);

// window_micros > 0 partitions flows by start-time window, one graph each;
// otherwise a single graph over all flows.
std::vector<TrafficRelationGraph> build_trgs(std::vector<Flow> flows, int64_t gamma_micros,
                                             int64_t window_micros);

}  // namespace trgkit
