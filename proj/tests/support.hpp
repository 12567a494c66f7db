// Shared helpers for the test suites: flow factories, a byte-level pcap
// builder, and the line-by-line reference of the burst-graph construction
// kept independent of the library implementation.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "trgkit/common.hpp"
#include "trgkit/trg.hpp"

namespace testsupport {

inline trgkit::Flow make_flow(uint64_t id, int64_t start_micros,
                              std::vector<uint16_t> tokens = {},
                              std::vector<int32_t> lengths = {},
                              std::string label = "") {
    trgkit::Flow f;
    f.id = id;
    f.start_ts_micros = start_micros;
    f.datagram_tokens = std::move(tokens);
    f.directed_lengths = std::move(lengths);
    f.label = std::move(label);
    f.n_packets = static_cast<uint32_t>(f.directed_lengths.size());
    return f;
}

inline std::vector<trgkit::Flow> flows_at(const std::vector<int64_t>& starts) {
    std::vector<trgkit::Flow> out;
    for (size_t i = 0; i < starts.size(); ++i) out.push_back(make_flow(i, starts[i]));
    return out;
}

// normalized (lo, hi, kind) triple for set comparison
using EdgeTriple = std::tuple<uint64_t, uint64_t, int>;

inline std::set<EdgeTriple> edge_set(const trgkit::TrafficRelationGraph& g) {
    std::set<EdgeTriple> out;
    for (const auto& e : g.edges)
        out.insert({std::min(e.src, e.dst), std::max(e.src, e.dst), static_cast<int>(e.kind)});
    return out;
}

struct ReferenceGraph {
    std::vector<std::vector<uint64_t>> bursts;
    std::set<EdgeTriple> edges;
};

// Straight-line transcription of the published construction pseudocode with
// the two declared fixups: the first flow opens the first burst, and the
// final burst is flushed after the loop.
inline ReferenceGraph alg1_reference(std::vector<trgkit::Flow> flows, int64_t gamma) {
    std::sort(flows.begin(), flows.end(), [](const trgkit::Flow& a, const trgkit::Flow& b) {
        if (a.start_ts_micros != b.start_ts_micros) return a.start_ts_micros < b.start_ts_micros;
        return a.id < b.id;
    });

    ReferenceGraph ref;
    std::vector<uint64_t> burst, burst_last;
    std::vector<int64_t> burst_starts;  // start times parallel to `burst`
    auto chain_edges = [&](const std::vector<uint64_t>& b) {
        for (size_t i = 0; i + 1 < b.size(); ++i)
            ref.edges.insert({std::min(b[i], b[i + 1]), std::max(b[i], b[i + 1]), 0});
    };
    auto adjacency_edges = [&](const std::vector<uint64_t>& prev,
                               const std::vector<uint64_t>& cur) {
        if (prev.empty()) return;
        ref.edges.insert(
            {std::min(prev.back(), cur.front()), std::max(prev.back(), cur.front()), 1});
        ref.edges.insert(
            {std::min(prev.back(), cur.back()), std::max(prev.back(), cur.back()), 1});
    };

    for (const auto& f : flows) {
        if (!burst.empty()) {
            int64_t gap = f.start_ts_micros - burst_starts.back();
            if (gap < 0) gap = -gap;
            if (gap <= gamma) {
                burst.push_back(f.id);
                burst_starts.push_back(f.start_ts_micros);
            } else {
                chain_edges(burst);
                adjacency_edges(burst_last, burst);
                ref.bursts.push_back(burst);
                burst_last = burst;
                burst = {f.id};
                burst_starts = {f.start_ts_micros};
            }
        } else {
            burst = {f.id};
            burst_starts = {f.start_ts_micros};
        }
    }
    if (!burst.empty()) {
        chain_edges(burst);
        adjacency_edges(burst_last, burst);
        ref.bursts.push_back(burst);
    }
    return ref;
}

// random instance for the oracle-equivalence and property suites
inline std::vector<trgkit::Flow> random_flows(trgkit::DetRng& rng, size_t max_flows,
                                              int64_t max_start_micros) {
    size_t n = 1 + rng.bounded(max_flows);
    std::vector<trgkit::Flow> out;
    for (size_t i = 0; i < n; ++i)
        out.push_back(make_flow(i, static_cast<int64_t>(rng.bounded(
                                       static_cast<uint64_t>(max_start_micros)))));
    return out;
}

// --- raw pcap crafting -------------------------------------------------------

struct PcapBuilder {
    std::vector<uint8_t> bytes;

    explicit PcapBuilder(uint32_t magic = 0xa1b2c3d4, uint32_t link_type = 1) {
        u32(magic);
        u16(2);
        u16(4);
        u32(0);
        u32(0);
        u32(262144);
        u32(link_type);
    }

    void u16(uint16_t x) {
        bytes.push_back(static_cast<uint8_t>(x));
        bytes.push_back(static_cast<uint8_t>(x >> 8));
    }
    void u32(uint32_t x) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>(x >> (8 * i)));
    }
    void record(uint32_t sec, uint32_t frac, const std::vector<uint8_t>& frame) {
        u32(sec);
        u32(frac);
        u32(static_cast<uint32_t>(frame.size()));
        u32(static_cast<uint32_t>(frame.size()));
        bytes.insert(bytes.end(), frame.begin(), frame.end());
    }
};

inline void be16(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x));
}

// Ethernet + IPv4 frame with an arbitrary protocol byte; vlan_tags prepends
// 802.1Q headers.
inline std::vector<uint8_t> ipv4_frame(uint8_t proto, uint32_t src, uint32_t dst,
                                       uint16_t sport, uint16_t dport,
                                       const std::vector<uint8_t>& payload, int vlan_tags = 0,
                                       uint16_t frag_field = 0) {
    std::vector<uint8_t> f(12, 0);
    for (int i = 0; i < vlan_tags; ++i) {
        be16(f, 0x8100);
        be16(f, 0);
    }
    be16(f, 0x0800);

    size_t th_len = proto == 6 ? 20 : (proto == 17 ? 8 : 0);
    auto total = static_cast<uint16_t>(20 + th_len + payload.size());
    f.push_back(0x45);
    f.push_back(0);
    be16(f, total);
    be16(f, 0);
    be16(f, frag_field);
    f.push_back(64);
    f.push_back(proto);
    be16(f, 0);
    for (int i = 3; i >= 0; --i) f.push_back(static_cast<uint8_t>(src >> (8 * i)));
    for (int i = 3; i >= 0; --i) f.push_back(static_cast<uint8_t>(dst >> (8 * i)));

    if (proto == 6) {
        be16(f, sport);
        be16(f, dport);
        for (int i = 0; i < 8; ++i) f.push_back(0);  // seq + ack
        f.push_back(0x50);
        f.push_back(0x10);
        be16(f, 65535);
        be16(f, 0);
        be16(f, 0);
    } else if (proto == 17) {
        be16(f, sport);
        be16(f, dport);
        be16(f, static_cast<uint16_t>(8 + payload.size()));
        be16(f, 0);
    }
    f.insert(f.end(), payload.begin(), payload.end());
    return f;
}

}  // namespace testsupport
