#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trgkit/common.hpp"

namespace trgkit {

enum class Protocol : uint8_t { tcp = 6, udp = 17 };

inline const char* protocol_name(Protocol p) { return p == Protocol::tcp ? "tcp" : "udp"; }

// IPv4 or IPv6 address. v4 lives in bytes[0..3].
struct IpAddr {
    bool v6 = false;
    std::array<uint8_t, 16> bytes{};

    static IpAddr v4(uint32_t host_order);
    static IpAddr parse(const std::string& text);
    std::string to_string() const;

    friend bool operator==(const IpAddr&, const IpAddr&) = default;
    friend auto operator<=>(const IpAddr&, const IpAddr&) = default;
};

struct PacketRecord {
    int64_t ts_micros = 0;
    IpAddr src_ip;
    IpAddr dst_ip;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    Protocol protocol = Protocol::tcp;
    std::vector<uint8_t> payload;   // transport payload, headers stripped
    uint64_t capture_index = 0;     // record ordinal within the source file
    uint32_t ip_total_length = 0;   // on-wire IP datagram length
};

struct FilterSpec {
    std::set<Protocol> include_protocols;  // empty = all
    uint32_t min_payload_len = 0;
    std::optional<std::set<IpAddr>> ip_allowlist;  // match on either endpoint
};

struct ParseResult {
    std::vector<PacketRecord> records;
    uint64_t total_records = 0;  // pcap records seen
    uint64_t skipped = 0;        // records not yielding a PacketRecord
    std::map<std::string, uint64_t> skip_reasons;
};

// Classic pcap only. Magic selects endianness and timestamp resolution.
// Throws MalformedHeader, TruncatedRecord (detail = records parsed so far),
// UnsupportedLinkType.
ParseResult parse_capture(const std::vector<uint8_t>& data);

std::vector<PacketRecord> filter_packets(const std::vector<PacketRecord>& records,
                                         const FilterSpec& spec);

struct PcapWriteOptions {
    bool nanosecond = false;
    bool big_endian = false;
    uint32_t link_type = 1;  // Ethernet
};

// Synthesizes a classic pcap with Ethernet framing (or raw IP for link_type 101).
std::vector<uint8_t> write_pcap(const std::vector<PacketRecord>& records,
                                const PcapWriteOptions& opts = {});

// One JSON object per record; payload hex-encoded lowercase.
std::string packet_to_jsonl(const PacketRecord& r);

}  // namespace trgkit
