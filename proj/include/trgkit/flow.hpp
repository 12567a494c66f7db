#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trgkit/pcap.hpp"

namespace trgkit {

struct Endpoint {
    IpAddr ip;
    uint16_t port = 0;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

// Canonical unordered endpoint pair + protocol. `anchor` is the endpoint that
// sent the first packet and defines the "+" direction.
struct FlowKey {
    Endpoint lo, hi;  // lo <= hi
    Protocol protocol = Protocol::tcp;

    static FlowKey canonical(const Endpoint& a, const Endpoint& b, Protocol p) {
        FlowKey k;
        k.protocol = p;
        if (b < a) { k.lo = b; k.hi = a; } else { k.lo = a; k.hi = b; }
        return k;
    }

    friend bool operator==(const FlowKey&, const FlowKey&) = default;
    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct Flow {
    uint64_t id = 0;
    FlowKey key;
    Endpoint anchor;            // direction anchor (first sender)
    Endpoint peer;              // the other endpoint
    std::string label;          // empty = unlabeled
    int64_t start_ts_micros = 0;
    std::vector<PacketRecord> packets;      // empty when loaded from JSONL
    std::vector<uint16_t> datagram_tokens;  // byte-pair tokens
    std::vector<int32_t> directed_lengths;  // signed IP datagram lengths
    uint32_t n_packets = 0;
    uint32_t source_id = 0;     // index into FlowSet::sources
};

struct FlowSet {
    std::vector<Flow> flows;  // sorted by (start_ts, capture order)
    std::vector<std::string> sources;
    uint64_t total_records = 0;
    uint64_t yielded_packets = 0;
    uint64_t skipped_packets = 0;
    std::map<std::string, uint64_t> skip_reasons;
};

// Groups records (sorted by ts, capture_index) into bidirectional five-tuple
// flows; a gap beyond idle_timeout_micros starts a new flow under the same key.
// Records are moved into the flows they belong to.
std::vector<Flow> assemble_flows(std::vector<PacketRecord> records,
                                 int64_t idle_timeout_micros);

// Byte-pair tokens over the concatenated transport payloads, truncated to
// max_bytes. A trailing odd byte b becomes token b*256.
std::vector<uint16_t> extract_datagram_tokens(const Flow& flow, uint32_t max_bytes = 128);

// Signed per-packet IP datagram lengths, + when sent by the anchor, truncated
// to max_packets.
std::vector<int32_t> extract_directed_lengths(const Flow& flow, uint32_t max_packets = 32);

std::string flow_to_jsonl(const Flow& flow, const std::vector<std::string>& sources);
Flow flow_from_jsonl(const std::string& line, std::vector<std::string>& sources);

}  // namespace trgkit
