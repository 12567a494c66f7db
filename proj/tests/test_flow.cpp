#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "json.hpp"

#include "support.hpp"
#include "trgkit/flow.hpp"

using namespace trgkit;

namespace {

PacketRecord pkt(int64_t ts, const char* src, uint16_t sport, const char* dst, uint16_t dport,
                 size_t payload_len = 0, uint32_t ip_total = 0, uint64_t cap_idx = 0) {
    PacketRecord r;
    r.ts_micros = ts;
    r.src_ip = IpAddr::parse(src);
    r.dst_ip = IpAddr::parse(dst);
    r.src_port = sport;
    r.dst_port = dport;
    r.protocol = Protocol::tcp;
    r.payload.assign(payload_len, 0x5a);
    r.ip_total_length = ip_total ? ip_total : static_cast<uint32_t>(40 + payload_len);
    r.capture_index = cap_idx;
    return r;
}

}  // namespace

TEST_CASE("single packet becomes a single flow") {
    auto flows = assemble_flows({pkt(123, "10.0.0.1", 1000, "10.0.0.2", 80)}, 1000000);
    REQUIRE(flows.size() == 1);
    CHECK(flows[0].packets.size() == 1);
    CHECK(flows[0].start_ts_micros == 123);
    CHECK(flows[0].n_packets == 1);
}

TEST_CASE("reverse-direction packets join the same flow with opposite signs") {
    auto flows = assemble_flows(
        {
            pkt(0, "10.0.0.1", 1000, "10.0.0.2", 80, 0, 128, 0),
            pkt(10, "10.0.0.2", 80, "10.0.0.1", 1000, 0, 74, 1),
        },
        1000000);
    REQUIRE(flows.size() == 1);
    auto lens = extract_directed_lengths(flows[0]);
    CHECK(lens == std::vector<int32_t>{128, -74});
}

TEST_CASE("an idle gap beyond the timeout starts a new flow") {
    auto flows = assemble_flows(
        {
            pkt(0, "10.0.0.1", 1000, "10.0.0.2", 80, 0, 40, 0),
            pkt(2000000, "10.0.0.1", 1000, "10.0.0.2", 80, 0, 40, 1),
        },
        1000000);
    REQUIRE(flows.size() == 2);
    CHECK(flows[0].start_ts_micros == 0);
    CHECK(flows[1].start_ts_micros == 2000000);
}

TEST_CASE("flows come out sorted by start time") {
    std::vector<PacketRecord> recs;
    recs.push_back(pkt(50, "10.0.0.3", 1, "10.0.0.4", 2, 0, 40, 0));
    recs.push_back(pkt(60, "10.0.0.1", 1, "10.0.0.2", 2, 0, 40, 1));
    recs.push_back(pkt(70, "10.0.0.3", 1, "10.0.0.4", 2, 0, 40, 2));
    std::sort(recs.begin(), recs.end(),
              [](const PacketRecord& a, const PacketRecord& b) { return a.ts_micros < b.ts_micros; });
    auto flows = assemble_flows(std::move(recs), 1000000);
    REQUIRE(flows.size() == 2);
    CHECK(flows[0].start_ts_micros == 50);
    CHECK(flows[1].start_ts_micros == 60);
}

TEST_CASE("datagram tokens pair bytes big-endian") {
    Flow f;
    f.anchor = {IpAddr::parse("10.0.0.1"), 1};
    auto p = pkt(0, "10.0.0.1", 1, "10.0.0.2", 2);
    p.payload = {0xee, 0x08, 0xbf, 0x56};
    f.packets.push_back(p);
    CHECK(extract_datagram_tokens(f) == std::vector<uint16_t>{0xee08, 0xbf56});
}

TEST_CASE("empty payloads produce an empty token sequence") {
    Flow f;
    f.packets.push_back(pkt(0, "10.0.0.1", 1, "10.0.0.2", 2, 0));
    CHECK(extract_datagram_tokens(f).empty());
}

TEST_CASE("token extraction truncates to max_bytes") {
    Flow f;
    auto p = pkt(0, "10.0.0.1", 1, "10.0.0.2", 2);
    p.payload.resize(130);
    for (size_t i = 0; i < p.payload.size(); ++i) p.payload[i] = static_cast<uint8_t>(i);
    f.packets.push_back(p);
    auto tokens = extract_datagram_tokens(f, 128);
    REQUIRE(tokens.size() == 64);
    CHECK(tokens[0] == 0x0001);
    CHECK(tokens[63] == static_cast<uint16_t>(126 * 256 + 127));  // bytes 128,129 discarded
}

TEST_CASE("a trailing odd byte becomes token b*256") {
    Flow f;
    auto p = pkt(0, "10.0.0.1", 1, "10.0.0.2", 2);
    p.payload = {0xaa, 0xbb, 0xcc};
    f.packets.push_back(p);
    CHECK(extract_datagram_tokens(f) == std::vector<uint16_t>{0xaabb, 0xcc00});
}

TEST_CASE("token concatenation spans packet boundaries") {
    Flow f;
    auto p1 = pkt(0, "10.0.0.1", 1, "10.0.0.2", 2);
    p1.payload = {0xee};
    auto p2 = pkt(1, "10.0.0.2", 2, "10.0.0.1", 1);
    p2.payload = {0x08, 0xbf, 0x56};
    f.packets = {p1, p2};
    CHECK(extract_datagram_tokens(f) == std::vector<uint16_t>{0xee08, 0xbf56});
}

TEST_CASE("token budget must be even and positive") {
    Flow f;
    CHECK_THROWS_AS(extract_datagram_tokens(f, 0), Error);
    CHECK_THROWS_AS(extract_datagram_tokens(f, 3), Error);
}

TEST_CASE("directed lengths follow the paper's example shape") {
    Flow f;
    f.anchor = {IpAddr::parse("10.0.0.1"), 1000};
    f.packets = {
        pkt(0, "10.0.0.1", 1000, "10.0.0.2", 80, 0, 128, 0),
        pkt(1, "10.0.0.2", 80, "10.0.0.1", 1000, 0, 74, 1),
        pkt(2, "10.0.0.2", 80, "10.0.0.1", 1000, 0, 1020, 2),
        pkt(3, "10.0.0.1", 1000, "10.0.0.2", 80, 0, 378, 3),
    };
    CHECK(extract_directed_lengths(f) == std::vector<int32_t>{128, -74, -1020, 378});
}

TEST_CASE("single outbound packet keeps its positive sign") {
    Flow f;
    f.anchor = {IpAddr::parse("10.0.0.1"), 1};
    f.packets = {pkt(0, "10.0.0.1", 1, "10.0.0.2", 2, 0, 60)};
    CHECK(extract_directed_lengths(f) == std::vector<int32_t>{60});
}

TEST_CASE("directed lengths truncate to max_packets") {
    Flow f;
    f.anchor = {IpAddr::parse("10.0.0.1"), 1};
    for (int i = 0; i < 40; ++i)
        f.packets.push_back(pkt(i, "10.0.0.1", 1, "10.0.0.2", 2, 0, 40, i));
    CHECK(extract_directed_lengths(f, 32).size() == 32);
    CHECK_THROWS_AS(extract_directed_lengths(f, 0), Error);
}

TEST_CASE("relabeling the anchor flips every sign and nothing else") {
    DetRng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        Flow f;
        f.anchor = {IpAddr::parse("10.0.0.1"), 10};
        f.peer = {IpAddr::parse("10.0.0.2"), 20};
        size_t n = 1 + rng.bounded(20);
        for (size_t i = 0; i < n; ++i) {
            bool fwd = rng.bounded(2);
            f.packets.push_back(fwd ? pkt(static_cast<int64_t>(i), "10.0.0.1", 10, "10.0.0.2",
                                          20, 0, 40 + static_cast<uint32_t>(rng.bounded(1000)), i)
                                    : pkt(static_cast<int64_t>(i), "10.0.0.2", 20, "10.0.0.1",
                                          10, 0, 40 + static_cast<uint32_t>(rng.bounded(1000)), i));
        }
        auto a = extract_directed_lengths(f, 64);
        std::swap(f.anchor, f.peer);
        auto b = extract_directed_lengths(f, 64);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == -b[i]);
    }
}

TEST_CASE("token decoding reproduces the payload prefix on even totals") {
    DetRng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Flow f;
        std::vector<uint8_t> all;
        size_t n_pkts = 1 + rng.bounded(5);
        for (size_t i = 0; i < n_pkts; ++i) {
            auto p = pkt(static_cast<int64_t>(i), "10.0.0.1", 1, "10.0.0.2", 2);
            p.payload.resize(rng.bounded(40) * 2);  // keep totals even
            for (auto& x : p.payload) x = static_cast<uint8_t>(rng.bounded(256));
            all.insert(all.end(), p.payload.begin(), p.payload.end());
            f.packets.push_back(std::move(p));
        }
        auto tokens = extract_datagram_tokens(f, 128);
        std::vector<uint8_t> decoded;
        for (uint16_t t : tokens) {
            decoded.push_back(static_cast<uint8_t>(t >> 8));
            decoded.push_back(static_cast<uint8_t>(t & 0xff));
        }
        size_t expect = std::min<size_t>(all.size(), 128);
        REQUIRE(decoded.size() == expect);
        CHECK(std::equal(decoded.begin(), decoded.end(), all.begin()));
    }
}

TEST_CASE("every packet lands in exactly one flow") {
    DetRng rng(23);
    std::vector<PacketRecord> recs;
    for (int i = 0; i < 200; ++i) {
        std::string a = "10.0.0." + std::to_string(1 + rng.bounded(4));
        std::string b = "10.0.1." + std::to_string(1 + rng.bounded(4));
        bool fwd = rng.bounded(2);
        auto r = pkt(static_cast<int64_t>(rng.bounded(10000000)), fwd ? a.c_str() : b.c_str(),
                     1000, fwd ? b.c_str() : a.c_str(), 80, 0, 40,
                     static_cast<uint64_t>(i));
        recs.push_back(std::move(r));
    }
    std::stable_sort(recs.begin(), recs.end(), [](const PacketRecord& a, const PacketRecord& b) {
        if (a.ts_micros != b.ts_micros) return a.ts_micros < b.ts_micros;
        return a.capture_index < b.capture_index;
    });
    auto original = recs;
    auto flows = assemble_flows(std::move(recs), 500000);

    std::vector<PacketRecord> rebuilt;
    for (const auto& f : flows)
        rebuilt.insert(rebuilt.end(), f.packets.begin(), f.packets.end());
    REQUIRE(rebuilt.size() == original.size());
    std::stable_sort(rebuilt.begin(), rebuilt.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         if (a.ts_micros != b.ts_micros) return a.ts_micros < b.ts_micros;
                         return a.capture_index < b.capture_index;
                     });
    for (size_t i = 0; i < rebuilt.size(); ++i) {
        CHECK(rebuilt[i].capture_index == original[i].capture_index);
        CHECK(rebuilt[i].ts_micros == original[i].ts_micros);
    }

    for (const auto& f : flows) {
        for (const auto& p : f.packets) {
            FlowKey k = FlowKey::canonical({p.src_ip, p.src_port}, {p.dst_ip, p.dst_port},
                                           p.protocol);
            CHECK(k == f.key);
        }
    }
}

TEST_CASE("flow JSONL round trip") {
    Flow f = testsupport::make_flow(5, 1234, {0xee08, 0xbf56}, {128, -74}, "Chat");
    f.anchor = {IpAddr::parse("10.0.0.1"), 443};
    f.peer = {IpAddr::parse("10.0.0.9"), 51000};
    f.key = FlowKey::canonical(f.anchor, f.peer, Protocol::tcp);
    f.n_packets = 2;
    std::vector<std::string> sources{"a.pcap"};

    std::string line = flow_to_jsonl(f, sources);
    std::vector<std::string> sources2;
    Flow g = flow_from_jsonl(line, sources2);
    CHECK(g.id == f.id);
    CHECK(g.label == f.label);
    CHECK(g.start_ts_micros == f.start_ts_micros);
    CHECK(g.datagram_tokens == f.datagram_tokens);
    CHECK(g.directed_lengths == f.directed_lengths);
    CHECK(g.n_packets == f.n_packets);
    CHECK(g.anchor == f.anchor);
    CHECK(g.peer == f.peer);
    CHECK(sources2 == sources);
    CHECK(flow_to_jsonl(g, sources2) == line);

    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("flow_id"));
    CHECK(j.contains("five_tuple"));
    CHECK(j["five_tuple"]["protocol"] == "tcp");
}

TEST_CASE("unlabeled flows serialize label as null") {
    Flow f = testsupport::make_flow(0, 0);
    f.anchor = {IpAddr::parse("10.0.0.1"), 1};
    f.peer = {IpAddr::parse("10.0.0.2"), 2};
    auto j = nlohmann::json::parse(flow_to_jsonl(f, {}));
    CHECK(j["label"].is_null());
}
