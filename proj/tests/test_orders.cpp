#include "doctest.h"

#include <random>

#include "domord/orders.hpp"

using namespace domord;

namespace {

OrderGraph graph_of(std::initializer_list<Edge> edges, std::initializer_list<int> extra = {}) {
    OrderGraph g;
    for (const auto& [a, b] : edges) g.add_edge(a, b);
    for (int v : extra) g.add_vertex(v);
    return g;
}

// Fig. 4 union order over the eight lunar months, as cross-block relations
// of the two per-year weak orders. ids: 0 Corner, 1 Peach, 2 Plum,
// 3 Pomegranate, 4 Winter, 5 Lotus, 6 Osmanthus, 7 Chrysanthemum.
OrderGraph lunar_union() {
    WeakOrder y2020{"monthLun", {{0}, {1, 2}, {3}, {4}}};
    WeakOrder y2021{"monthLun", {{3}, {5, 6}, {7}}};
    return union_order({graph_from_weak(y2020), graph_from_weak(y2021)});
}

}  // namespace

TEST_CASE("acyclicity basics") {
    CHECK(is_acyclic(graph_of({{0, 1}, {1, 2}})));
    CHECK_FALSE(is_acyclic(graph_of({{0, 1}, {1, 0}})));  // Blue/Red flipped
    CHECK(is_acyclic(lunar_union()));
}

TEST_CASE("weak order recovery from the quarter example") {
    // [{Jan},{Apr,Jun},{Aug},{Oct,Dec}] ids 0..5 in that listing order
    WeakOrder expected{"monthGreg", {{0}, {1, 2}, {3}, {4, 5}}};
    auto recovered = check_weak_total(expected.to_edges(), {0, 1, 2, 3, 4, 5}, "monthGreg");
    REQUIRE(recovered.has_value());
    CHECK(recovered->blocks == expected.blocks);
}

TEST_CASE("weak order over a single value") {
    auto w = check_weak_total({}, {4});
    REQUIRE(w.has_value());
    CHECK(w->blocks == std::vector<std::vector<int>>{{4}});
}

TEST_CASE("cyclic inference is not a weak order") {
    // Winter both before and after the chain closes a cycle
    EdgeSet inferred{{4, 1}, {1, 3}, {3, 4}};
    CHECK_FALSE(check_weak_total(inferred, {1, 3, 4}).has_value());
}

TEST_CASE("incomparability that is not transitive is rejected") {
    // 0<1 and nothing else over three values: 2 is incomparable to both,
    // but 0,1 are ordered, so no block partition reproduces the closure.
    CHECK_FALSE(check_weak_total({{0, 1}}, {0, 1, 2}).has_value());
}

TEST_CASE("union order contains per-group edges and nothing else") {
    OrderGraph u = lunar_union();
    CHECK(u.edges.count({3, 5}));        // (Pomegranate, Lotus) from 2021
    CHECK_FALSE(u.edges.count({5, 6}));  // Lotus, Osmanthus share a block
    CHECK(u.m() == 8);
    CHECK(u.edges.size() == 14);
}

TEST_CASE("union of one order is that order") {
    OrderGraph g = graph_of({{0, 1}, {1, 2}});
    OrderGraph u = union_order({g});
    CHECK(u.edges == g.edges);
    CHECK(u.vertices == g.vertices);
}

TEST_CASE("conflicting ribbon orders union to a cyclic graph") {
    // China White<Red<Blue vs Canada White<Blue<Red
    OrderGraph china = graph_of({{0, 1}, {1, 2}, {0, 2}});
    OrderGraph canada = graph_of({{0, 2}, {2, 1}, {0, 1}});
    CHECK_FALSE(is_acyclic(union_order({china, canada})));
}

TEST_CASE("reachable pairs of the lunar union graph") {
    CHECK(reachable_pair_count(lunar_union()) == 23);
}

TEST_CASE("reachable pairs trivia") {
    OrderGraph empty5;
    for (int v = 0; v < 5; ++v) empty5.add_vertex(v);
    CHECK(reachable_pair_count(empty5) == 0);
    CHECK(reachable_pair_count(graph_of({{0, 1}, {1, 2}, {2, 3}})) == 6);
    CHECK_THROWS_AS(reachable_pair_count(graph_of({{0, 1}, {1, 0}})), contract_error);
}

TEST_CASE("weak order round trip on random block partitions") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int m = 1 + static_cast<int>(rng() % 7);
        std::vector<int> values(m);
        for (int i = 0; i < m; ++i) values[i] = i;
        std::shuffle(values.begin(), values.end(), rng);
        WeakOrder w;
        std::size_t at = 0;
        while (at < values.size()) {
            std::size_t len = 1 + rng() % (values.size() - at);
            std::vector<int> block(values.begin() + at, values.begin() + at + len);
            std::sort(block.begin(), block.end());
            w.blocks.push_back(block);
            at += len;
        }
        std::vector<int> all(m);
        for (int i = 0; i < m; ++i) all[i] = i;
        auto rec = check_weak_total(w.to_edges(), all);
        REQUIRE(rec.has_value());
        CHECK(rec->to_edges() == w.to_edges());
        CHECK(rec->blocks == w.blocks);
    }
}

TEST_CASE("union is idempotent, commutative, associative on edge sets") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        auto random_graph = [&]() {
            OrderGraph g;
            int m = 2 + rng() % 4;
            for (int e = 0; e < 4; ++e) {
                int a = rng() % m, b = rng() % m;
                if (a != b) g.add_edge(a, b);
            }
            for (int v = 0; v < m; ++v) g.add_vertex(v);
            return g;
        };
        OrderGraph x = random_graph(), y = random_graph(), z = random_graph();
        CHECK(union_order({x, x}).edges == x.edges);
        CHECK(union_order({x, y}).edges == union_order({y, x}).edges);
        CHECK(union_order({union_order({x, y}), z}).edges ==
              union_order({x, union_order({y, z})}).edges);
    }
}

TEST_CASE("pair count of a strong total order is m choose 2") {
    for (int m = 2; m <= 9; ++m) {
        OrderGraph g;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) g.add_edge(i, j);
        CHECK(reachable_pair_count(g) == m * (m - 1) / 2);
    }
}
