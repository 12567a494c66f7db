#include "trgkit/pcap.hpp"

#include <arpa/inet.h>

#include <cstring>

#include "json.hpp"

namespace trgkit {

IpAddr IpAddr::v4(uint32_t host_order) {
    IpAddr a;
    a.v6 = false;
    a.bytes[0] = static_cast<uint8_t>(host_order >> 24);
    a.bytes[1] = static_cast<uint8_t>(host_order >> 16);
    a.bytes[2] = static_cast<uint8_t>(host_order >> 8);
    a.bytes[3] = static_cast<uint8_t>(host_order);
    return a;
}

IpAddr IpAddr::parse(const std::string& text) {
    IpAddr a;
    in_addr v4{};
    if (inet_pton(AF_INET, text.c_str(), &v4) == 1) {
        a.v6 = false;
        std::memcpy(a.bytes.data(), &v4, 4);
        return a;
    }
    in6_addr v6{};
    if (inet_pton(AF_INET6, text.c_str(), &v6) == 1) {
        a.v6 = true;
        std::memcpy(a.bytes.data(), &v6, 16);
        return a;
    }
    throw Error(errc::input, "BadAddress", "unparseable IP address: " + text);
}

std::string IpAddr::to_string() const {
    char buf[INET6_ADDRSTRLEN] = {0};
    if (!v6) {
        in_addr v4{};
        std::memcpy(&v4, bytes.data(), 4);
        inet_ntop(AF_INET, &v4, buf, sizeof(buf));
    } else {
        in6_addr a6{};
        std::memcpy(&a6, bytes.data(), 16);
        inet_ntop(AF_INET6, &a6, buf, sizeof(buf));
    }
    return buf;
}

namespace {

constexpr uint32_t kMagicMicroLE = 0xa1b2c3d4;
constexpr uint32_t kMagicMicroBE = 0xd4c3b2a1;
constexpr uint32_t kMagicNanoLE = 0xa1b23c4d;
constexpr uint32_t kMagicNanoBE = 0x4d3cb2a1;

constexpr uint32_t kLinkEthernet = 1;
constexpr uint32_t kLinkRawIp = 101;

struct Cursor {
    const uint8_t* p;
    size_t n;

    uint32_t u32(size_t off, bool swap) const {
        uint32_t v;
        std::memcpy(&v, p + off, 4);
        return swap ? __builtin_bswap32(v) : v;
    }
    uint16_t u16be(size_t off) const {
        return static_cast<uint16_t>((p[off] << 8) | p[off + 1]);
    }
};

// Walks L2/L3 of one captured frame; returns false (with reason) when the
// frame does not yield a TCP/UDP PacketRecord.
bool decode_frame(const uint8_t* data, size_t caplen, uint32_t link_type,
                  PacketRecord& out, std::string& reason) {
    size_t off = 0;
    int ip_version = 0;

    if (link_type == kLinkEthernet) {
        if (caplen < 14) {
            reason = "truncated_l2";
            return false;
        }
        uint16_t ethertype = static_cast<uint16_t>((data[12] << 8) | data[13]);
        off = 14;
        for (int vlans = 0; vlans < 2; ++vlans) {
            if (ethertype != 0x8100 && ethertype != 0x88a8 && ethertype != 0x9100) break;
            if (caplen < off + 4) {
                reason = "truncated_l2";
                return false;
            }
            ethertype = static_cast<uint16_t>((data[off + 2] << 8) | data[off + 3]);
            off += 4;
        }
        if (ethertype == 0x0800) ip_version = 4;
        else if (ethertype == 0x86dd) ip_version = 6;
        else {
            reason = "non_ip";
            return false;
        }
    } else {  // raw IP
        if (caplen < 1) {
            reason = "truncated_l2";
            return false;
        }
        ip_version = data[0] >> 4;
        if (ip_version != 4 && ip_version != 6) {
            reason = "non_ip";
            return false;
        }
    }

    const uint8_t* ip = data + off;
    size_t ip_cap = caplen - off;
    size_t transport_off = 0;   // relative to ip
    size_t datagram_end = 0;    // relative to ip, per length fields
    uint8_t proto = 0;

    if (ip_version == 4) {
        if (ip_cap < 20) {
            reason = "truncated_ip";
            return false;
        }
        size_t ihl = static_cast<size_t>(ip[0] & 0x0f) * 4;
        if (ihl < 20 || ip_cap < ihl) {
            reason = "truncated_ip";
            return false;
        }
        uint16_t total_len = static_cast<uint16_t>((ip[2] << 8) | ip[3]);
        uint16_t flags_frag = static_cast<uint16_t>((ip[6] << 8) | ip[7]);
        if ((flags_frag & 0x1fff) != 0) {  // non-first fragment
            reason = "ip_fragment";
            return false;
        }
        proto = ip[9];
        out.src_ip.v6 = false;
        out.dst_ip.v6 = false;
        std::memcpy(out.src_ip.bytes.data(), ip + 12, 4);
        std::memcpy(out.dst_ip.bytes.data(), ip + 16, 4);
        out.ip_total_length = total_len;
        transport_off = ihl;
        datagram_end = total_len;
    } else {
        if (ip_cap < 40) {
            reason = "truncated_ip";
            return false;
        }
        uint16_t payload_len = static_cast<uint16_t>((ip[4] << 8) | ip[5]);
        uint8_t next = ip[6];
        out.src_ip.v6 = true;
        out.dst_ip.v6 = true;
        std::memcpy(out.src_ip.bytes.data(), ip + 8, 16);
        std::memcpy(out.dst_ip.bytes.data(), ip + 24, 16);
        out.ip_total_length = 40u + payload_len;
        size_t pos = 40;
        datagram_end = 40u + payload_len;
        // follow extension headers far enough to find TCP/UDP
        while (next != 6 && next != 17) {
            if (next == 0 || next == 43 || next == 60) {
                if (ip_cap < pos + 2) {
                    reason = "truncated_ip";
                    return false;
                }
                uint8_t nh = ip[pos];
                size_t len = 8u * (static_cast<size_t>(ip[pos + 1]) + 1);
                next = nh;
                pos += len;
            } else if (next == 44) {  // fragment header
                if (ip_cap < pos + 8) {
                    reason = "truncated_ip";
                    return false;
                }
                uint16_t fragoff = static_cast<uint16_t>(((ip[pos + 2] << 8) | ip[pos + 3]) >> 3);
                if (fragoff != 0) {
                    reason = "ip_fragment";
                    return false;
                }
                next = ip[pos];
                pos += 8;
            } else {
                reason = "non_transport";
                return false;
            }
            if (pos > ip_cap) {
                reason = "truncated_ip";
                return false;
            }
        }
        proto = next;
        transport_off = pos;
    }

    if (proto != 6 && proto != 17) {
        reason = "non_transport";
        return false;
    }

    const uint8_t* th = ip + transport_off;
    size_t th_cap = ip_cap > transport_off ? ip_cap - transport_off : 0;
    size_t data_off = 0;
    if (proto == 6) {
        if (th_cap < 20) {
            reason = "truncated_transport";
            return false;
        }
        out.protocol = Protocol::tcp;
        out.src_port = static_cast<uint16_t>((th[0] << 8) | th[1]);
        out.dst_port = static_cast<uint16_t>((th[2] << 8) | th[3]);
        data_off = static_cast<size_t>(th[12] >> 4) * 4;
        if (data_off < 20 || th_cap < data_off) {
            reason = "truncated_transport";
            return false;
        }
    } else {
        if (th_cap < 8) {
            reason = "truncated_transport";
            return false;
        }
        out.protocol = Protocol::udp;
        out.src_port = static_cast<uint16_t>((th[0] << 8) | th[1]);
        out.dst_port = static_cast<uint16_t>((th[2] << 8) | th[3]);
        data_off = 8;
    }

    size_t payload_begin = transport_off + data_off;
    size_t payload_end = std::min(ip_cap, datagram_end);
    out.payload.clear();
    if (payload_end > payload_begin)
        out.payload.assign(ip + payload_begin, ip + payload_end);
    return true;
}

}  // namespace

ParseResult parse_capture(const std::vector<uint8_t>& data) {
    if (data.size() < 24)
        throw Error(errc::input, "MalformedHeader", "file shorter than pcap global header");

    Cursor c{data.data(), data.size()};
    uint32_t raw_magic = c.u32(0, false);

    bool swap = false, nanos = false;
    switch (raw_magic) {
        case kMagicMicroLE: break;
        case kMagicMicroBE: swap = true; break;
        case kMagicNanoLE: nanos = true; break;
        case kMagicNanoBE: swap = true; nanos = true; break;
        default:
            throw Error(errc::input, "MalformedHeader", "unrecognized pcap magic");
    }

    uint32_t link_type = c.u32(20, swap);
    if (link_type != kLinkEthernet && link_type != kLinkRawIp)
        throw Error(errc::input, "UnsupportedLinkType",
                    "link type " + std::to_string(link_type) + " (only Ethernet and raw IP)");

    ParseResult res;
    size_t pos = 24;
    while (pos < data.size()) {
        if (data.size() - pos < 16)
            throw Error(errc::input, "TruncatedRecord",
                        "trailing bytes shorter than a record header after " +
                            std::to_string(res.total_records) + " records",
                        static_cast<int64_t>(res.total_records));
        uint32_t ts_sec = c.u32(pos, swap);
        uint32_t ts_frac = c.u32(pos + 4, swap);
        uint32_t incl_len = c.u32(pos + 8, swap);
        if (data.size() - pos - 16 < incl_len)
            throw Error(errc::input, "TruncatedRecord",
                        "record claims " + std::to_string(incl_len) + " bytes after " +
                            std::to_string(res.total_records) + " records",
                        static_cast<int64_t>(res.total_records));

        PacketRecord rec;
        rec.ts_micros = static_cast<int64_t>(ts_sec) * 1000000 +
                        (nanos ? static_cast<int64_t>(ts_frac) / 1000
                               : static_cast<int64_t>(ts_frac));
        rec.capture_index = res.total_records;

        std::string reason;
        if (decode_frame(data.data() + pos + 16, incl_len, link_type, rec, reason)) {
            res.records.push_back(std::move(rec));
        } else {
            ++res.skipped;
            ++res.skip_reasons[reason];
        }
        ++res.total_records;
        pos += 16 + incl_len;
    }
    return res;
}

std::vector<PacketRecord> filter_packets(const std::vector<PacketRecord>& records,
                                         const FilterSpec& spec) {
    std::vector<PacketRecord> out;
    for (const auto& r : records) {
        if (!spec.include_protocols.empty() && !spec.include_protocols.count(r.protocol)) continue;
        if (r.payload.size() < spec.min_payload_len) continue;
        if (spec.ip_allowlist && !spec.ip_allowlist->empty() &&
            !spec.ip_allowlist->count(r.src_ip) && !spec.ip_allowlist->count(r.dst_ip))
            continue;
        out.push_back(r);
    }
    return out;
}

namespace {

void put_u16be(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x));
}

void put_u32(std::vector<uint8_t>& v, uint32_t x, bool big_endian) {
    if (big_endian) x = __builtin_bswap32(x);
    for (int i = 0; i < 4; ++i) v.push_back(static_cast<uint8_t>(x >> (8 * i)));
}

}  // namespace

std::vector<uint8_t> write_pcap(const std::vector<PacketRecord>& records,
                                const PcapWriteOptions& opts) {
    std::vector<uint8_t> out;
    uint32_t magic = opts.nanosecond ? kMagicNanoLE : kMagicMicroLE;
    put_u32(out, magic, opts.big_endian);
    // version 2.4, thiszone 0, sigfigs 0
    if (opts.big_endian) {
        put_u16be(out, 2);
        put_u16be(out, 4);
    } else {
        out.push_back(2); out.push_back(0);
        out.push_back(4); out.push_back(0);
    }
    put_u32(out, 0, opts.big_endian);
    put_u32(out, 0, opts.big_endian);
    put_u32(out, 262144, opts.big_endian);
    put_u32(out, opts.link_type, opts.big_endian);

    for (const auto& r : records) {
        std::vector<uint8_t> frame;
        bool v6 = r.src_ip.v6;
        uint8_t proto = static_cast<uint8_t>(r.protocol);
        size_t th_len = (r.protocol == Protocol::tcp) ? 20 : 8;

        if (opts.link_type == kLinkEthernet) {
            frame.insert(frame.end(), 12, 0);  // zero MACs
            put_u16be(frame, v6 ? 0x86dd : 0x0800);
        }

        if (!v6) {
            uint32_t min_total = static_cast<uint32_t>(20 + th_len + r.payload.size());
            uint32_t total = std::max(min_total, r.ip_total_length);
            if (total > 65535) total = min_total;
            frame.push_back(0x45);
            frame.push_back(0);
            put_u16be(frame, static_cast<uint16_t>(total));
            put_u16be(frame, 0);   // id
            put_u16be(frame, 0);   // flags/frag
            frame.push_back(64);   // ttl
            frame.push_back(proto);
            put_u16be(frame, 0);   // checksum (unvalidated)
            frame.insert(frame.end(), r.src_ip.bytes.begin(), r.src_ip.bytes.begin() + 4);
            frame.insert(frame.end(), r.dst_ip.bytes.begin(), r.dst_ip.bytes.begin() + 4);
        } else {
            uint32_t min_payload = static_cast<uint32_t>(th_len + r.payload.size());
            uint32_t datagram = std::max(static_cast<uint32_t>(40 + min_payload), r.ip_total_length);
            uint32_t plen = datagram - 40;
            if (plen > 65535) plen = min_payload;
            frame.push_back(0x60);
            frame.insert(frame.end(), 3, 0);
            put_u16be(frame, static_cast<uint16_t>(plen));
            frame.push_back(proto);
            frame.push_back(64);  // hop limit
            frame.insert(frame.end(), r.src_ip.bytes.begin(), r.src_ip.bytes.end());
            frame.insert(frame.end(), r.dst_ip.bytes.begin(), r.dst_ip.bytes.end());
        }

        if (r.protocol == Protocol::tcp) {
            put_u16be(frame, r.src_port);
            put_u16be(frame, r.dst_port);
            put_u32(frame, 0, true);  // seq
            put_u32(frame, 0, true);  // ack
            frame.push_back(0x50);    // data offset 5
            frame.push_back(0x10);    // ACK
            put_u16be(frame, 65535);
            put_u16be(frame, 0);      // checksum
            put_u16be(frame, 0);      // urgent
        } else {
            put_u16be(frame, r.src_port);
            put_u16be(frame, r.dst_port);
            put_u16be(frame, static_cast<uint16_t>(8 + r.payload.size()));
            put_u16be(frame, 0);
        }
        frame.insert(frame.end(), r.payload.begin(), r.payload.end());

        uint32_t sec = static_cast<uint32_t>(r.ts_micros / 1000000);
        uint32_t frac = static_cast<uint32_t>(r.ts_micros % 1000000);
        if (opts.nanosecond) frac *= 1000;
        put_u32(out, sec, opts.big_endian);
        put_u32(out, frac, opts.big_endian);
        put_u32(out, static_cast<uint32_t>(frame.size()), opts.big_endian);
        uint32_t orig = static_cast<uint32_t>(frame.size());
        if (!v6 && r.ip_total_length > 20 + th_len + r.payload.size()) {
            orig = r.ip_total_length + (opts.link_type == kLinkEthernet ? 14 : 0);
        }
        put_u32(out, orig, opts.big_endian);
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

std::string packet_to_jsonl(const PacketRecord& r) {
    nlohmann::json j;
    j["ts_micros"] = r.ts_micros;
    j["src_ip"] = r.src_ip.to_string();
    j["dst_ip"] = r.dst_ip.to_string();
    j["src_port"] = r.src_port;
    j["dst_port"] = r.dst_port;
    j["protocol"] = protocol_name(r.protocol);
    j["payload"] = hex_encode(r.payload);
    j["capture_index"] = r.capture_index;
    j["ip_total_length"] = r.ip_total_length;
    return j.dump();
}

}  // namespace trgkit
