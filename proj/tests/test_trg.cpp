#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "support.hpp"
#include "trgkit/trg.hpp"

using namespace trgkit;
using namespace testsupport;

namespace {

constexpr int64_t kSec = 1000000;

std::set<EdgeTriple> edges_of_kind(const TrafficRelationGraph& g, EdgeKind kind) {
    std::set<EdgeTriple> out;
    for (const auto& e : g.edges)
        if (e.kind == kind)
            out.insert({std::min(e.src, e.dst), std::max(e.src, e.dst), static_cast<int>(kind)});
    return out;
}

}  // namespace

TEST_CASE("one flow, one burst") {
    auto bursts = segment_bursts(flows_at({42}), kSec);
    REQUIRE(bursts.size() == 1);
    CHECK(bursts[0].flow_ids == std::vector<uint64_t>{0});
    CHECK(bursts[0].start_ts_micros == 42);
}

TEST_CASE("starts [0, 0.5s, 3s] with gamma 1s split into two bursts") {
    auto bursts = segment_bursts(flows_at({0, kSec / 2, 3 * kSec}), kSec);
    REQUIRE(bursts.size() == 2);
    CHECK(bursts[0].flow_ids == std::vector<uint64_t>{0, 1});
    CHECK(bursts[1].flow_ids == std::vector<uint64_t>{2});
}

TEST_CASE("the chained rule keeps [0, 0.9s, 1.8s] in one burst") {
    auto bursts = segment_bursts(flows_at({0, 900000, 1800000}), kSec);
    REQUIRE(bursts.size() == 1);
    CHECK(bursts[0].flow_ids == std::vector<uint64_t>{0, 1, 2});
}

TEST_CASE("gamma must be positive") {
    CHECK_THROWS_AS(segment_bursts(flows_at({0}), 0), Error);
}

TEST_CASE("single-flow graph has one node and no edges") {
    auto g = build_trg(flows_at({7}), kSec);
    CHECK(g.node_count() == 1);
    CHECK(g.edges.empty());
    CHECK(g.bursts.size() == 1);
}

TEST_CASE("three-flow example dedups the adjacency pair into a singleton burst") {
    auto g = build_trg(flows_at({0, kSec / 2, 3 * kSec}), kSec);
    CHECK(edges_of_kind(g, EdgeKind::burst) == std::set<EdgeTriple>{{0, 1, 0}});
    CHECK(edges_of_kind(g, EdgeKind::adjacency) == std::set<EdgeTriple>{{1, 2, 1}});
    CHECK(g.edges.size() == 2);
}

TEST_CASE("five-flow example matches the traced edge list") {
    auto g = build_trg(flows_at({0, kSec / 2, 3 * kSec, 3 * kSec + 200000, 10 * kSec}), kSec);
    REQUIRE(g.bursts.size() == 3);
    CHECK(g.bursts[0].flow_ids == std::vector<uint64_t>{0, 1});
    CHECK(g.bursts[1].flow_ids == std::vector<uint64_t>{2, 3});
    CHECK(g.bursts[2].flow_ids == std::vector<uint64_t>{4});
    CHECK(edges_of_kind(g, EdgeKind::burst) == std::set<EdgeTriple>{{0, 1, 0}, {2, 3, 0}});
    CHECK(edges_of_kind(g, EdgeKind::adjacency) ==
          std::set<EdgeTriple>{{1, 2, 1}, {1, 3, 1}, {3, 4, 1}});
}

TEST_CASE("adjacency matrix is symmetric with a zero diagonal") {
    auto g1 = build_trg(flows_at({5}), kSec);
    auto a1 = g1.adjacency_matrix();
    REQUIRE(a1.size() == 1);
    CHECK(a1[0][0] == 0);

    auto g = build_trg(flows_at({0, kSec / 2, 3 * kSec}), kSec);
    auto a = g.adjacency_matrix();
    REQUIRE(a.size() == 3);
    CHECK(a[0][1] == 1);
    CHECK(a[1][0] == 1);
    CHECK(a[1][2] == 1);
    CHECK(a[2][1] == 1);
    CHECK(a[0][2] == 0);
    for (size_t i = 0; i < 3; ++i) CHECK(a[i][i] == 0);

    // two far-apart singleton traces built as separate graphs stay edgeless
    for (auto start : {0L, 3600L * kSec}) {
        auto iso = build_trg(flows_at({start}), kSec);
        CHECK(iso.adjacency_matrix()[0][0] == 0);
        CHECK(iso.edges.empty());
    }
}

TEST_CASE("oracle equivalence against the line-by-line reference") {
    DetRng rng(2024);
    const int64_t gammas[] = {kSec / 10, kSec, 5 * kSec};
    for (int trial = 0; trial < 300; ++trial) {
        auto flows = random_flows(rng, 200, 60 * kSec);
        int64_t gamma = gammas[trial % 3];
        auto g = build_trg(flows, gamma);
        auto ref = alg1_reference(flows, gamma);

        REQUIRE(g.bursts.size() == ref.bursts.size());
        for (size_t i = 0; i < ref.bursts.size(); ++i)
            CHECK(g.bursts[i].flow_ids == ref.bursts[i]);
        CHECK(edge_set(g) == ref.edges);
    }
}

TEST_CASE("burst partition properties hold on random instances") {
    DetRng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        auto flows = random_flows(rng, 120, 30 * kSec);
        int64_t gamma = 1 + static_cast<int64_t>(rng.bounded(3 * kSec));
        auto g = build_trg(flows, gamma);

        // partition: non-empty, disjoint, covering, ordered by start time
        std::set<uint64_t> seen;
        size_t covered = 0;
        int64_t prev_start = -1;
        for (const auto& b : g.bursts) {
            REQUIRE(!b.flow_ids.empty());
            for (uint64_t id : b.flow_ids) CHECK(seen.insert(id).second);
            covered += b.flow_ids.size();
            CHECK(b.start_ts_micros >= prev_start);
            prev_start = b.start_ts_micros;
        }
        CHECK(covered == flows.size());

        // gap properties
        auto start_of = [&](uint64_t id) {
            return g.flows[g.node_index(id)].start_ts_micros;
        };
        for (const auto& b : g.bursts)
            for (size_t i = 0; i + 1 < b.flow_ids.size(); ++i)
                CHECK(start_of(b.flow_ids[i + 1]) - start_of(b.flow_ids[i]) <= gamma);
        for (size_t i = 0; i + 1 < g.bursts.size(); ++i)
            CHECK(start_of(g.bursts[i + 1].flow_ids.front()) -
                      start_of(g.bursts[i].flow_ids.back()) >
                  gamma);

        // edge-count bounds
        size_t burst_edges = 0, adj_edges = 0;
        for (const auto& e : g.edges)
            (e.kind == EdgeKind::burst ? burst_edges : adj_edges) += 1;
        size_t expect_burst = 0;
        for (const auto& b : g.bursts) expect_burst += b.flow_ids.size() - 1;
        CHECK(burst_edges == expect_burst);
        if (g.bursts.size() > 1) {
            CHECK(adj_edges >= g.bursts.size() - 1);
            CHECK(adj_edges <= 2 * (g.bursts.size() - 1));
        } else {
            CHECK(adj_edges == 0);
        }

        // no self loops, no duplicate triples, endpoints exist
        std::set<EdgeTriple> uniq;
        for (const auto& e : g.edges) {
            CHECK(e.src != e.dst);
            CHECK(uniq.insert({std::min(e.src, e.dst), std::max(e.src, e.dst),
                               static_cast<int>(e.kind)})
                      .second);
            g.node_index(e.src);
            g.node_index(e.dst);
        }
    }
}

TEST_CASE("raising gamma never increases the number of bursts") {
    DetRng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        auto flows = random_flows(rng, 80, 20 * kSec);
        int64_t g1 = 1 + static_cast<int64_t>(rng.bounded(2 * kSec));
        int64_t g2 = g1 + 1 + static_cast<int64_t>(rng.bounded(2 * kSec));
        CHECK(segment_bursts(flows, g2).size() <= segment_bursts(flows, g1).size());
    }
}

TEST_CASE("unknown node lookups throw") {
    auto g = build_trg(flows_at({0}), kSec);
    CHECK_THROWS_WITH_AS(g.node_index(99), doctest::Contains("UnknownNode"), Error);
}

TEST_CASE("windowing splits flows into one graph per window") {
    auto graphs = build_trgs(flows_at({0, kSec / 2, 10 * kSec, 11 * kSec}), kSec, 5 * kSec);
    REQUIRE(graphs.size() == 2);
    CHECK(graphs[0].node_count() == 2);
    CHECK(graphs[1].node_count() == 2);

    auto single = build_trgs(flows_at({0, kSec / 2, 10 * kSec}), kSec, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0].node_count() == 3);
}

TEST_CASE("graph label is the node-label consensus") {
    auto flows = flows_at({0, 100, 200});
    flows[0].label = "Chat";
    flows[1].label = "Chat";
    flows[2].label = "Mail";
    CHECK(build_trg(flows, kSec).label() == "Chat");
    CHECK(build_trg(flows_at({0}), kSec).label().empty());
}
