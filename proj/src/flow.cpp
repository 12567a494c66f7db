#include "trgkit/flow.hpp"

#include <algorithm>

#include "json.hpp"

namespace trgkit {

std::vector<Flow> assemble_flows(std::vector<PacketRecord> records,
                                 int64_t idle_timeout_micros) {
    std::vector<Flow> done;
    struct Open {
        Flow flow;
        int64_t last_ts = 0;
    };
    std::map<FlowKey, Open> open;

    for (auto& rec : records) {
        Endpoint src{rec.src_ip, rec.src_port};
        Endpoint dst{rec.dst_ip, rec.dst_port};
        FlowKey key = FlowKey::canonical(src, dst, rec.protocol);

        auto it = open.find(key);
        if (it != open.end() && rec.ts_micros - it->second.last_ts > idle_timeout_micros) {
            done.push_back(std::move(it->second.flow));
            open.erase(it);
            it = open.end();
        }
        if (it == open.end()) {
            Open o;
            o.flow.key = key;
            o.flow.anchor = src;
            o.flow.peer = dst;
            o.flow.start_ts_micros = rec.ts_micros;
            o.last_ts = rec.ts_micros;
            o.flow.packets.push_back(std::move(rec));
            open.emplace(key, std::move(o));
        } else {
            it->second.last_ts = rec.ts_micros;
            it->second.flow.packets.push_back(std::move(rec));
        }
    }
    for (auto& [k, o] : open) done.push_back(std::move(o.flow));

    std::sort(done.begin(), done.end(), [](const Flow& a, const Flow& b) {
        if (a.start_ts_micros != b.start_ts_micros)
            return a.start_ts_micros < b.start_ts_micros;
        return a.packets.front().capture_index < b.packets.front().capture_index;
    });
    for (auto& f : done) f.n_packets = static_cast<uint32_t>(f.packets.size());
    return done;
}

std::vector<uint16_t> extract_datagram_tokens(const Flow& flow, uint32_t max_bytes) {
    if (max_bytes == 0 || max_bytes % 2 != 0)
        throw Error(errc::config, "BadTokenBudget", "max_bytes must be even and > 0");

    std::vector<uint8_t> bytes;
    bytes.reserve(max_bytes);
    for (const auto& p : flow.packets) {
        for (uint8_t b : p.payload) {
            bytes.push_back(b);
            if (bytes.size() == max_bytes) break;
        }
        if (bytes.size() == max_bytes) break;
    }

    std::vector<uint16_t> tokens;
    tokens.reserve((bytes.size() + 1) / 2);
    for (size_t i = 0; i + 1 < bytes.size(); i += 2)
        tokens.push_back(static_cast<uint16_t>(bytes[i] * 256 + bytes[i + 1]));
    if (bytes.size() % 2 == 1)
        tokens.push_back(static_cast<uint16_t>(bytes.back() * 256));
    return tokens;
}

std::vector<int32_t> extract_directed_lengths(const Flow& flow, uint32_t max_packets) {
    if (max_packets == 0)
        throw Error(errc::config, "BadPacketBudget", "max_packets must be > 0");

    std::vector<int32_t> out;
    out.reserve(std::min<size_t>(flow.packets.size(), max_packets));
    for (const auto& p : flow.packets) {
        if (out.size() == max_packets) break;
        Endpoint src{p.src_ip, p.src_port};
        int32_t len = static_cast<int32_t>(p.ip_total_length);
        out.push_back(src == flow.anchor ? len : -len);
    }
    return out;
}

std::string flow_to_jsonl(const Flow& flow, const std::vector<std::string>& sources) {
    nlohmann::json j;
    j["flow_id"] = flow.id;
    if (flow.label.empty())
        j["label"] = nullptr;
    else
        j["label"] = flow.label;
    j["start_ts_micros"] = flow.start_ts_micros;
    j["five_tuple"] = {
        {"src_ip", flow.anchor.ip.to_string()},
        {"src_port", flow.anchor.port},
        {"dst_ip", flow.peer.ip.to_string()},
        {"dst_port", flow.peer.port},
        {"protocol", protocol_name(flow.key.protocol)},
    };
    j["datagram_tokens"] = flow.datagram_tokens;
    j["directed_lengths"] = flow.directed_lengths;
    j["n_packets"] = flow.n_packets;
    j["source"] = flow.source_id < sources.size() ? sources[flow.source_id] : "";
    return j.dump();
}

Flow flow_from_jsonl(const std::string& line, std::vector<std::string>& sources) {
    nlohmann::json j = nlohmann::json::parse(line);
    Flow f;
    f.id = j.at("flow_id").get<uint64_t>();
    if (j.contains("label") && !j["label"].is_null()) f.label = j["label"].get<std::string>();
    f.start_ts_micros = j.at("start_ts_micros").get<int64_t>();
    const auto& ft = j.at("five_tuple");
    f.anchor.ip = IpAddr::parse(ft.at("src_ip").get<std::string>());
    f.anchor.port = ft.at("src_port").get<uint16_t>();
    f.peer.ip = IpAddr::parse(ft.at("dst_ip").get<std::string>());
    f.peer.port = ft.at("dst_port").get<uint16_t>();
    std::string proto = ft.at("protocol").get<std::string>();
    f.key = FlowKey::canonical(f.anchor, f.peer,
                               proto == "udp" ? Protocol::udp : Protocol::tcp);
    f.datagram_tokens = j.at("datagram_tokens").get<std::vector<uint16_t>>();
    f.directed_lengths = j.at("directed_lengths").get<std::vector<int32_t>>();
    f.n_packets = j.at("n_packets").get<uint32_t>();
    std::string source = j.value("source", std::string());
    auto it = std::find(sources.begin(), sources.end(), source);
    if (it == sources.end()) {
        f.source_id = static_cast<uint32_t>(sources.size());
        sources.push_back(source);
    } else {
        f.source_id = static_cast<uint32_t>(it - sources.begin());
    }
    return f;
}

}  // namespace trgkit
