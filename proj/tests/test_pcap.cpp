#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include "support.hpp"
#include "trgkit/pcap.hpp"

using namespace trgkit;
using namespace testsupport;

namespace {

PacketRecord tcp_packet(int64_t ts, const char* src, uint16_t sport, const char* dst,
                        uint16_t dport, std::vector<uint8_t> payload) {
    PacketRecord r;
    r.ts_micros = ts;
    r.src_ip = IpAddr::parse(src);
    r.dst_ip = IpAddr::parse(dst);
    r.src_port = sport;
    r.dst_port = dport;
    r.protocol = Protocol::tcp;
    r.payload = std::move(payload);
    return r;
}

}  // namespace

TEST_CASE("microsecond little-endian magic decodes timestamps directly") {
    auto bytes = write_pcap({tcp_packet(1234567, "10.0.0.1", 1000, "10.0.0.2", 80, {1, 2})});
    CHECK(bytes[0] == 0xd4);  // 0xa1b2c3d4 stored little-endian
    CHECK(bytes[3] == 0xa1);
    auto res = parse_capture(bytes);
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].ts_micros == 1234567);
}

TEST_CASE("nanosecond magic divides the stored fraction by 1000") {
    PcapBuilder b(0xa1b23c4d);
    b.record(1, 123456789, ipv4_frame(6, 0x0a000001, 0x0a000002, 10, 20, {}));
    auto res = parse_capture(b.bytes);
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].ts_micros == 1000000 + 123456);
}

TEST_CASE("byte-swapped files parse identically") {
    auto recs = std::vector<PacketRecord>{
        tcp_packet(42, "192.168.1.5", 1234, "8.8.8.8", 443, {0xde, 0xad})};
    PcapWriteOptions opts;
    opts.big_endian = true;
    auto res = parse_capture(write_pcap(recs, opts));
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].ts_micros == 42);
    CHECK(res.records[0].src_ip.to_string() == "192.168.1.5");
    CHECK(res.records[0].dst_port == 443);

    opts.nanosecond = true;
    auto res2 = parse_capture(write_pcap(recs, opts));
    REQUIRE(res2.records.size() == 1);
    CHECK(res2.records[0].ts_micros == 42);
}

TEST_CASE("non-transport packets are skipped and counted") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.record(0, 1, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.record(0, 2, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.record(0, 3, ipv4_frame(1, 1, 2, 0, 0, {1, 2, 3, 4, 5, 6, 7, 8}));  // ICMP
    auto res = parse_capture(b.bytes);
    CHECK(res.records.size() == 3);
    CHECK(res.skipped == 1);
    CHECK(res.total_records == 4);
    CHECK(res.skip_reasons.at("non_transport") == 1);
}

TEST_CASE("truncated record aborts with the parsed count") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.record(0, 1, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.record(0, 2, ipv4_frame(6, 1, 2, 10, 20, {}));
    auto cut = b.bytes;
    cut.resize(cut.size() - 10);  // rip into the third record's frame
    try {
        parse_capture(cut);
        FAIL("expected TruncatedRecord");
    } catch (const Error& e) {
        CHECK(e.kind() == "TruncatedRecord");
        CHECK(e.detail() == 2);
    }

    auto stub = b.bytes;
    stub.resize(24 + 70 + 70 + 5);  // trailing garbage shorter than a header
    CHECK_THROWS_WITH_AS(parse_capture(stub), doctest::Contains("TruncatedRecord"), Error);
}

TEST_CASE("header errors") {
    std::vector<uint8_t> garbage(24, 0x13);
    CHECK_THROWS_WITH_AS(parse_capture(garbage), doctest::Contains("MalformedHeader"), Error);
    CHECK_THROWS_WITH_AS(parse_capture({1, 2, 3}), doctest::Contains("MalformedHeader"), Error);

    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.bytes[20] = 105;  // 802.11
    CHECK_THROWS_WITH_AS(parse_capture(b.bytes), doctest::Contains("UnsupportedLinkType"),
                         Error);
}

TEST_CASE("vlan tags are skipped up to two levels") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {0xaa}, 1));
    b.record(0, 1, ipv4_frame(6, 1, 2, 10, 20, {0xbb}, 2));
    b.record(0, 2, ipv4_frame(6, 1, 2, 10, 20, {0xcc}, 3));
    auto res = parse_capture(b.bytes);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].payload == std::vector<uint8_t>{0xaa});
    CHECK(res.records[1].payload == std::vector<uint8_t>{0xbb});
    CHECK(res.skip_reasons.at("non_ip") == 1);
}

TEST_CASE("non-first IP fragments are dropped and counted") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {}, 0, 0x00b9));  // offset 185
    b.record(0, 1, ipv4_frame(6, 1, 2, 10, 20, {}, 0, 0x2000));  // MF, offset 0: first fragment
    auto res = parse_capture(b.bytes);
    CHECK(res.records.size() == 1);
    CHECK(res.skip_reasons.at("ip_fragment") == 1);
}

TEST_CASE("raw-IP link type") {
    PcapWriteOptions opts;
    opts.link_type = 101;
    auto recs = std::vector<PacketRecord>{tcp_packet(7, "1.2.3.4", 5, "4.3.2.1", 6, {9})};
    auto res = parse_capture(write_pcap(recs, opts));
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].payload == std::vector<uint8_t>{9});
}

TEST_CASE("claimed datagram length survives snaplen-style truncation") {
    auto rec = tcp_packet(0, "1.1.1.1", 1, "2.2.2.2", 2, {});
    rec.ip_total_length = 1020;
    auto res = parse_capture(write_pcap({rec}));
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].ip_total_length == 1020);
    CHECK(res.records[0].payload.empty());
}

TEST_CASE("filter: empty spec is the identity") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {1}));
    b.record(0, 1, ipv4_frame(17, 1, 2, 10, 20, {2}));
    auto recs = parse_capture(b.bytes).records;
    auto out = filter_packets(recs, FilterSpec{});
    REQUIRE(out.size() == recs.size());
    for (size_t i = 0; i < out.size(); ++i) CHECK(out[i].payload == recs[i].payload);
}

TEST_CASE("filter: protocol and payload-length predicates") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 1, 2, 10, 20, {}));
    b.record(0, 1, ipv4_frame(17, 1, 2, 10, 20, {1, 2}));
    b.record(0, 2, ipv4_frame(6, 1, 2, 10, 20, std::vector<uint8_t>(40, 7)));
    auto recs = parse_capture(b.bytes).records;

    FilterSpec tcp_only;
    tcp_only.include_protocols = {Protocol::tcp};
    auto t = filter_packets(recs, tcp_only);
    REQUIRE(t.size() == 2);
    CHECK(t[0].capture_index == 0);
    CHECK(t[1].capture_index == 2);

    FilterSpec min_len;
    min_len.min_payload_len = 1;
    auto m = filter_packets(recs, min_len);
    REQUIRE(m.size() == 2);

    min_len.min_payload_len = 40;
    auto m40 = filter_packets(recs, min_len);
    REQUIRE(m40.size() == 1);
    CHECK(m40[0].payload.size() == 40);
}

TEST_CASE("filter: allowlist matches either endpoint; filtering is idempotent") {
    PcapBuilder b;
    b.record(0, 0, ipv4_frame(6, 0x0a000001, 0x0a000002, 1, 2, {1}));
    b.record(0, 1, ipv4_frame(6, 0x0a000003, 0x0a000004, 1, 2, {2}));
    auto recs = parse_capture(b.bytes).records;

    FilterSpec spec;
    spec.ip_allowlist = {{IpAddr::parse("10.0.0.2")}};
    auto once = filter_packets(recs, spec);
    REQUIRE(once.size() == 1);
    CHECK(once[0].payload == std::vector<uint8_t>{1});

    DetRng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        FilterSpec s;
        if (rng.bounded(2)) s.include_protocols = {rng.bounded(2) ? Protocol::tcp : Protocol::udp};
        s.min_payload_len = static_cast<uint32_t>(rng.bounded(4));
        auto a = filter_packets(recs, s);
        auto b2 = filter_packets(a, s);
        REQUIRE(a.size() == b2.size());
    }
}

TEST_CASE("round trip: synthetic pcap reparses to field-identical records") {
    DetRng rng(1234);
    std::vector<PacketRecord> recs;
    for (int i = 0; i < 60; ++i) {
        PacketRecord r;
        r.ts_micros = static_cast<int64_t>(rng.bounded(1000000000));
        bool v6 = rng.bounded(4) == 0;
        if (v6) {
            r.src_ip.v6 = r.dst_ip.v6 = true;
            for (auto& x : r.src_ip.bytes) x = static_cast<uint8_t>(rng.bounded(256));
            for (auto& x : r.dst_ip.bytes) x = static_cast<uint8_t>(rng.bounded(256));
        } else {
            r.src_ip = IpAddr::v4(static_cast<uint32_t>(rng.bounded(0xffffffff)));
            r.dst_ip = IpAddr::v4(static_cast<uint32_t>(rng.bounded(0xffffffff)));
        }
        r.src_port = static_cast<uint16_t>(rng.bounded(65536));
        r.dst_port = static_cast<uint16_t>(rng.bounded(65536));
        r.protocol = rng.bounded(2) ? Protocol::tcp : Protocol::udp;
        r.payload.resize(rng.bounded(101));
        for (auto& x : r.payload) x = static_cast<uint8_t>(rng.bounded(256));
        recs.push_back(std::move(r));
    }
    for (bool ns : {false, true}) {
        for (bool be : {false, true}) {
            PcapWriteOptions opts;
            opts.nanosecond = ns;
            opts.big_endian = be;
            auto res = parse_capture(write_pcap(recs, opts));
            REQUIRE(res.records.size() == recs.size());
            CHECK(res.skipped + res.records.size() == res.total_records);
            for (size_t i = 0; i < recs.size(); ++i) {
                CHECK(res.records[i].ts_micros == recs[i].ts_micros);
                CHECK(res.records[i].src_ip == recs[i].src_ip);
                CHECK(res.records[i].dst_ip == recs[i].dst_ip);
                CHECK(res.records[i].src_port == recs[i].src_port);
                CHECK(res.records[i].dst_port == recs[i].dst_port);
                CHECK(res.records[i].protocol == recs[i].protocol);
                CHECK(res.records[i].payload == recs[i].payload);
            }
        }
    }
}

TEST_CASE("packet jsonl dump uses lowercase hex payloads") {
    auto rec = tcp_packet(5, "10.0.0.1", 80, "10.0.0.2", 8080, {0xde, 0xad, 0xbe, 0xef});
    rec.capture_index = 3;
    rec.ip_total_length = 44;
    auto j = nlohmann::json::parse(packet_to_jsonl(rec));
    CHECK(j["payload"] == "deadbeef");
    CHECK(j["src_ip"] == "10.0.0.1");
    CHECK(j["dst_port"] == 8080);
    CHECK(j["protocol"] == "tcp");
    CHECK(j["capture_index"] == 3);
    CHECK(j["ts_micros"] == 5);
}
