#include "trgkit/trg.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace trgkit {

size_t TrafficRelationGraph::node_index(uint64_t flow_id) const {
    for (size_t i = 0; i < flows.size(); ++i)
        if (flows[i].id == flow_id) return i;
    throw Error(errc::input, "UnknownNode", "flow id " + std::to_string(flow_id));
}

std::vector<std::vector<uint8_t>> TrafficRelationGraph::adjacency_matrix() const {
    size_t n = flows.size();
    std::map<uint64_t, size_t> idx;
    for (size_t i = 0; i < n; ++i) idx[flows[i].id] = i;
    std::vector<std::vector<uint8_t>> a(n, std::vector<uint8_t>(n, 0));
    for (const auto& e : edges) {
        size_t i = idx.at(e.src), j = idx.at(e.dst);
        a[i][j] = 1;
        a[j][i] = 1;
    }
    return a;
}

std::vector<std::vector<uint32_t>> TrafficRelationGraph::neighbor_lists() const {
    size_t n = flows.size();
    std::map<uint64_t, size_t> idx;
    for (size_t i = 0; i < n; ++i) idx[flows[i].id] = i;
    std::vector<std::set<uint32_t>> nb(n);
    for (const auto& e : edges) {
        auto i = static_cast<uint32_t>(idx.at(e.src));
        auto j = static_cast<uint32_t>(idx.at(e.dst));
        nb[i].insert(j);
        nb[j].insert(i);
    }
    std::vector<std::vector<uint32_t>> out(n);
    for (size_t i = 0; i < n; ++i) out[i].assign(nb[i].begin(), nb[i].end());
    return out;
}

std::string TrafficRelationGraph::label() const {
    std::map<std::string, size_t> votes;
    for (const auto& f : flows)
        if (!f.label.empty()) ++votes[f.label];
    std::string best;
    size_t best_n = 0;
    for (const auto& [name, n] : votes) {
        if (n > best_n) {
            best = name;
            best_n = n;
        }
    }
    return best;
}

namespace {

std::vector<Flow> sort_by_start(std::vector<Flow> flows) {
    std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
        if (a.start_ts_micros != b.start_ts_micros)
            return a.start_ts_micros < b.start_ts_micros;
        return a.id < b.id;
    });
    return flows;
}

int64_t iabs(int64_t x) { return x < 0 ? -x : x; }

}  // namespace

std::vector<Burst> segment_bursts(const std::vector<Flow>& flows, int64_t gamma_micros) {
    if (gamma_micros <= 0)
        throw Error(errc::config, "BadGamma", "gamma_micros must be > 0");

    auto sorted = sort_by_start(flows);
    std::vector<Burst> bursts;
    int64_t last_start = 0;
    for (const auto& f : sorted) {
        if (bursts.empty() || iabs(f.start_ts_micros - last_start) > gamma_micros) {
            bursts.push_back(Burst{{f.id}, f.start_ts_micros});
        } else {
            bursts.back().flow_ids.push_back(f.id);
        }
        last_start = f.start_ts_micros;
    }
    return bursts;
}

TrafficRelationGraph build_trg(std::vector<Flow> flows, int64_t gamma_micros) {
    TrafficRelationGraph g;
    g.gamma_micros = gamma_micros;
    g.flows = sort_by_start(std::move(flows));
    g.bursts = segment_bursts(g.flows, gamma_micros);

    std::set<Edge> seen;
    auto insert_edge = [&](uint64_t a, uint64_t b, EdgeKind kind) {
        if (a == b) return;
        Edge e{std::min(a, b), std::max(a, b), kind};
        if (seen.insert(e).second) g.edges.push_back(e);
    };

    for (size_t bi = 0; bi < g.bursts.size(); ++bi) {
        const auto& ids = g.bursts[bi].flow_ids;
        for (size_t i = 0; i + 1 < ids.size(); ++i)
            insert_edge(ids[i], ids[i + 1], EdgeKind::burst);
        if (bi > 0) {
            const auto& prev = g.bursts[bi - 1].flow_ids;
            insert_edge(prev.back(), ids.front(), EdgeKind::adjacency);
            insert_edge(prev.back(), ids.back(), EdgeKind::adjacency);
        }
    }
    return g;
}

std::vector<TrafficRelationGraph> build_trgs(std::vector<Flow> flows, int64_t gamma_micros,
                                             int64_t window_micros) {
    if (window_micros <= 0) {
        std::vector<TrafficRelationGraph> out;
        if (!flows.empty()) out.push_back(build_trg(std::move(flows), gamma_micros));
        return out;
    }
    std::map<int64_t, std::vector<Flow>> windows;
    for (auto& f : flows) {
        int64_t w = f.start_ts_micros / window_micros;
        windows[w].push_back(std::move(f));
    }
    std::vector<TrafficRelationGraph> out;
    out.reserve(windows.size());
    for (auto& [w, fl] : windows) out.push_back(build_trg(std::move(fl), gamma_micros));
    return out;
}

}  // namespace trgkit
