#include "doctest.h"

#include <random>
#include <sstream>

#include "domord/cpp_sat.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace domord;
using testutil::load_festival;
using testutil::load_table5;
using testutil::make_relation;

namespace {

std::vector<BipartiteGraph> table5_bgs() {
    Relation rel = load_table5();
    int a = rel.require_attribute("A");
    int b = rel.require_attribute("B");
    Partition p = partition(rel, {rel.require_attribute("C")});
    std::vector<BipartiteGraph> bgs;
    for (const auto& g : p.groups) bgs.push_back(build_bipartite(rel, g, a, b));
    return bgs;
}

// Encode one CPP list as a partition group whose co-occurrence graph is a
// path forcing that chain on the left side.
std::vector<std::vector<std::string>> cpp_lists_to_rows(
    const std::vector<std::vector<std::string>>& lists) {
    std::vector<std::vector<std::string>> rows;
    int fresh = 0;
    for (std::size_t li = 0; li < lists.size(); ++li) {
        const auto& list = lists[li];
        std::string group = "g" + std::to_string(li);
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            std::string link = "w" + std::to_string(fresh++);
            rows.push_back({group, list[i], link});
            rows.push_back({group, list[i + 1], link});
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("precheck accepts identical and single chains") {
    Relation rel = make_relation({{"1", "a1", "b1"}, {"1", "a2", "b1"}, {"1", "a2", "b2"},
                                  {"2", "a1", "b1"}, {"2", "a2", "b1"}, {"2", "a2", "b2"}},
                                 {"g", "a", "b"});
    Partition p = partition(rel, {0});
    std::vector<BipartiteGraph> bgs;
    for (const auto& g : p.groups) bgs.push_back(build_bipartite(rel, g, 1, 2));
    CHECK(precheck_groups(bgs));
    bgs.pop_back();
    CHECK(precheck_groups(bgs));
}

TEST_CASE("precheck passes the size/ribbon pair; the instance is unsat") {
    Relation rel = load_festival();
    int size = rel.require_attribute("size");
    int ribbon = rel.require_attribute("ribbon");
    Partition p = partition(rel, {rel.require_attribute("country")});
    std::vector<BipartiteGraph> bgs;
    for (const auto& g : p.groups) bgs.push_back(build_bipartite(rel, g, size, ribbon));
    CHECK(precheck_groups(bgs));
    SolveResult sr = solve(reduce_to_sat(bgs));
    CHECK(sr.status == SolveStatus::Unsat);
}

TEST_CASE("families merge values that share a group") {
    auto bgs = table5_bgs();
    ValueFamilies fam = component_value_sets(bgs);
    REQUIRE(fam.left.size() == 1);
    CHECK(fam.left[0].size() == 4);  // values 1,2,3,4 linked via groups C=1 and C=2
    CHECK(fam.right.size() == 2);    // {1,2,3} and {4,5,6}
}

TEST_CASE("families of disjoint groups stay apart; empty input is empty") {
    Relation rel = make_relation({{"1", "a1", "b1"}, {"1", "a2", "b2"},
                                  {"2", "a3", "b3"}, {"2", "a4", "b4"}},
                                 {"g", "a", "b"});
    Partition p = partition(rel, {0});
    std::vector<BipartiteGraph> bgs;
    for (const auto& g : p.groups) bgs.push_back(build_bipartite(rel, g, 1, 2));
    ValueFamilies fam = component_value_sets(bgs);
    CHECK(fam.left.size() == 2);
    CHECK(component_value_sets({}).left.empty());
}

TEST_CASE("table 5 reduction carries the expected no-swap clauses") {
    auto bgs = table5_bgs();
    SatInstance inst = reduce_to_sat(bgs);
    Relation rel = load_table5();
    int a = rel.require_attribute("A");
    int b = rel.require_attribute("B");
    auto vid = [&](int attr, const std::string& s) {
        for (int v = 0; v < rel.distinct_count(attr); ++v)
            if (rel.value_string(attr, v) == s) return v;
        return -1;
    };
    int l12 = inst.var_of(0, vid(a, "1"), vid(a, "2"));
    int l21 = inst.var_of(0, vid(a, "2"), vid(a, "1"));
    int r12 = inst.var_of(1, vid(b, "1"), vid(b, "2"));
    int r21 = inst.var_of(1, vid(b, "2"), vid(b, "1"));
    REQUIRE(l12 > 0);
    REQUIRE(r21 > 0);
    bool clause1 = false, clause2 = false;
    for (const auto& cl : inst.clauses) {
        if (cl == std::vector<int>{l12, r21} || cl == std::vector<int>{r21, l12}) clause1 = true;
        if (cl == std::vector<int>{l21, r12} || cl == std::vector<int>{r12, l21}) clause2 = true;
    }
    CHECK(clause1);
    CHECK(clause2);
}

TEST_CASE("single-edge groups produce no no-swap clauses") {
    Relation rel = make_relation({{"1", "a1", "b1"}, {"2", "a2", "b2"}}, {"g", "a", "b"});
    Partition p = partition(rel, {0});
    std::vector<BipartiteGraph> bgs;
    for (const auto& g : p.groups) bgs.push_back(build_bipartite(rel, g, 1, 2));
    SatInstance inst = reduce_to_sat(bgs);
    for (const auto& cl : inst.clauses) {
        // only mutual-exclusion clauses remain, all of size 2 with negations
        CHECK(cl.size() == 2);
        CHECK(cl[0] < 0);
        CHECK(cl[1] < 0);
    }
}

TEST_CASE("a family of three left values gets six transitivity clauses") {
    Relation rel = make_relation({{"1", "a1", "b1"}, {"1", "a2", "b2"}, {"1", "a3", "b3"}},
                                 {"g", "a", "b"});
    std::vector<BipartiteGraph> bgs{build_bipartite(rel, {0, 1, 2}, 1, 2)};
    SatInstance inst = reduce_to_sat(bgs);
    std::size_t three_lit = 0;
    for (const auto& cl : inst.clauses) three_lit += cl.size() == 3;
    CHECK(three_lit == 12);  // six per side
}

TEST_CASE("clause and variable counts respect the reduction cost bounds") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);
        std::vector<std::vector<std::string>> raw;
        for (int i = 0; i < n; ++i)
            raw.push_back({"g" + std::to_string(rng() % 3), "a" + std::to_string(rng() % 4),
                           "b" + std::to_string(rng() % 4)});
        Relation rel = make_relation(raw, {"g", "a", "b"});
        Partition p = partition(rel, {0});
        std::vector<BipartiteGraph> bgs;
        for (const auto& g : p.groups) {
            BipartiteGraph bg = build_bipartite(rel, g, 1, 2);
            if (!check_bg_valid(simplify_singletons(bg))) {
                bgs.clear();
                break;
            }
            bgs.push_back(std::move(bg));
        }
        if (bgs.empty()) continue;
        SatInstance inst = reduce_to_sat(bgs);
        for (const auto& cl : inst.clauses) {
            CHECK(!cl.empty());
            for (int lit : cl) {
                CHECK(lit != 0);
                CHECK(std::abs(lit) <= inst.var_count);
            }
        }
        ValueFamilies fam = component_value_sets(bgs);
        long long var_bound = 0, trans_bound = 0;
        for (const auto* fams : {&fam.left, &fam.right})
            for (const auto& f : *fams) {
                long long size = static_cast<long long>(f.size());
                var_bound += size * (size - 1);
                trans_bound += size * (size - 1) * (size - 2);
            }
        long long noswap_bound = 0;
        for (const auto& bg : bgs)
            noswap_bound += 2 * static_cast<long long>(bg.edges.size()) * bg.edges.size();
        CHECK(inst.var_count <= var_bound);
        CHECK(static_cast<long long>(inst.clauses.size()) <=
              var_bound / 2 + noswap_bound + trans_bound);
    }
}

TEST_CASE("table 5 is satisfiable and unit contradictions are not") {
    SolveResult sr = solve(reduce_to_sat(table5_bgs()));
    CHECK(sr.status == SolveStatus::Sat);

    SatInstance contradiction;
    contradiction.var_count = 1;
    contradiction.vars.push_back({0, 0, 1});
    contradiction.clauses = {{1}, {-1}};
    CHECK(solve(contradiction).status == SolveStatus::Unsat);
}

TEST_CASE("table 3 gadget groups decide like the nae-3sat source") {
    oracle::Nae3SatInstance nae;
    nae.var_count = 3;
    nae.clauses = {{1, 2, -3}, {-1, 2, -3}, {-1, -2, 3}};
    oracle::CppInstance cpp = oracle::nae3sat_to_cpp(nae);
    Relation rel = testutil::make_relation(
        cpp_lists_to_rows(cpp.lists), {"g", "a", "b"},
        R"({"attributes":{"a":"implicit","b":"implicit"}})");
    IIUnconditionalOutcome out = validate_ii_unconditional(rel, {0}, 1, 2);
    bool nae_sat = oracle::nae3sat_brute(nae);
    CHECK(nae_sat == (out.status == IIUncondStatus::Valid));
    CHECK(nae_sat == oracle::cpp_polarization_brute(cpp));
}

TEST_CASE("extracted orders are acyclic and reverse cleanly") {
    SatInstance inst = reduce_to_sat(table5_bgs());
    SolveResult sr = solve(inst);
    REQUIRE(sr.status == SolveStatus::Sat);
    auto [a, b] = extract_orders(sr.assignment, inst, "A", "B");
    CHECK(is_acyclic(a));
    CHECK(is_acyclic(b));

    // polarity symmetry: swapping each pair's variables stays a model
    std::vector<char> flipped(sr.assignment.size());
    for (int v = 0; v < inst.var_count; v += 2) {
        flipped[v] = sr.assignment[v + 1];
        flipped[v + 1] = sr.assignment[v];
    }
    for (const auto& cl : inst.clauses) {
        bool sat = false;
        for (int lit : cl) {
            bool val = flipped[std::abs(lit) - 1];
            if (lit < 0) val = !val;
            sat |= val;
        }
        CHECK(sat);
    }
    auto [ra, rb] = extract_orders(flipped, inst, "A", "B");
    CHECK(is_acyclic(ra));
    CHECK(is_acyclic(rb));
}

TEST_CASE("all-false assignment on an edgeless instance gives empty orders") {
    SatInstance inst;
    inst.var_count = 2;
    inst.vars = {{0, 0, 1}, {0, 1, 0}};
    auto [a, b] = extract_orders(std::vector<char>(2, 0), inst, "A", "B");
    CHECK(a.edges.empty());
    CHECK(a.m() == 2);
    CHECK(b.m() == 0);
}

TEST_CASE("strongest orders on table 5 keep and drop the documented pairs") {
    Relation rel = load_table5();
    IIUnconditionalOutcome out =
        validate_ii_unconditional(rel, {rel.require_attribute("C")},
                                  rel.require_attribute("A"), rel.require_attribute("B"));
    REQUIRE(out.status == IIUncondStatus::Valid);
    int a = rel.require_attribute("A");
    auto vid = [&](const std::string& s) {
        for (int v = 0; v < rel.distinct_count(a); ++v)
            if (rel.value_string(a, v) == s) return v;
        return -1;
    };
    auto has_pair = [&](const std::string& x, const std::string& y) {
        return out.orders.order_a.edges.count({vid(x), vid(y)}) ||
               out.orders.order_a.edges.count({vid(y), vid(x)});
    };
    CHECK(has_pair("1", "2"));
    CHECK(has_pair("2", "4"));
    CHECK_FALSE(has_pair("1", "3"));
    CHECK_FALSE(has_pair("2", "3"));

    // kept pairs stay transitively closed
    EdgeSet closure = transitive_closure(out.orders.order_a);
    CHECK(closure == out.orders.order_a.edges);
}

TEST_CASE("a long path keeps its pairs; disjoint single edges drop everything") {
    Relation path = make_relation({{"1", "a1", "b1"}, {"1", "a2", "b1"}, {"1", "a2", "b2"},
                                   {"1", "a3", "b2"}, {"1", "a3", "b3"}, {"1", "a4", "b3"}},
                                  {"g", "a", "b"});
    IIUnconditionalOutcome out = validate_ii_unconditional(path, {0}, 1, 2);
    REQUIRE(out.status == IIUncondStatus::Valid);
    // interior path nodes have degree 2, so all left pairs survive
    CHECK(out.orders.order_a.edges.size() == 6);  // C(4,2)

    Relation sparse = make_relation({{"1", "a1", "b1"}, {"1", "a2", "b2"},
                                     {"2", "a3", "b3"}, {"2", "a4", "b4"}},
                                    {"g", "a", "b"});
    IIUnconditionalOutcome none = validate_ii_unconditional(sparse, {0}, 1, 2);
    REQUIRE(none.status == IIUncondStatus::Valid);
    CHECK(none.orders.order_a.edges.empty());
    CHECK(none.orders.order_b.edges.empty());
}

TEST_CASE("table 4 validates unconditionally with the exact chains") {
    Relation rel = testutil::load_table4();
    int month = rel.require_attribute("month");
    int version = rel.require_attribute("version");
    IIUnconditionalOutcome out =
        validate_ii_unconditional(rel, {rel.require_attribute("year")}, month, version);
    REQUIRE(out.status == IIUncondStatus::Valid);
    auto vid = [&](int attr, const std::string& s) {
        for (int v = 0; v < rel.distinct_count(attr); ++v)
            if (rel.value_string(attr, v) == s) return v;
        return -1;
    };
    EdgeSet fwd{{vid(month, "Jan"), vid(month, "Feb")},
                {vid(month, "Jan"), vid(month, "March")},
                {vid(month, "Feb"), vid(month, "March")}};
    EdgeSet rev;
    for (const auto& [a, b] : fwd) rev.emplace(b, a);
    bool forward = out.orders.order_a.edges == fwd &&
                   out.orders.order_b.edges ==
                       EdgeSet{{vid(version, "v99"), vid(version, "v100")}};
    bool reversed = out.orders.order_a.edges == rev &&
                    out.orders.order_b.edges ==
                        EdgeSet{{vid(version, "v100"), vid(version, "v99")}};
    CHECK((forward || reversed));
}

TEST_CASE("solver budget exhaustion reports undecided") {
    SolverBudget tiny;
    tiny.max_conflicts = 0;
    Relation rel = load_festival();
    IIUnconditionalOutcome out = validate_ii_unconditional(
        rel, {rel.require_attribute("country")}, rel.require_attribute("size"),
        rel.require_attribute("ribbon"), tiny);
    CHECK(out.status == IIUncondStatus::Undecided);
}

TEST_CASE("dimacs export lists the variable map and clause count") {
    SatInstance inst = reduce_to_sat(table5_bgs());
    std::vector<std::string> ln, rn;
    Relation rel = load_table5();
    for (int v = 0; v < rel.distinct_count(1); ++v) ln.push_back(rel.value_string(1, v));
    for (int v = 0; v < rel.distinct_count(2); ++v) rn.push_back(rel.value_string(2, v));
    std::ostringstream os;
    write_dimacs(inst, os, ln, rn);
    std::string text = os.str();
    CHECK(text.find("p cnf " + std::to_string(inst.var_count) + " " +
                    std::to_string(inst.clauses.size())) != std::string::npos);
    CHECK(text.find("c var 1 = ") != std::string::npos);
    std::size_t zero_lines = 0, pos = 0;
    while ((pos = text.find(" 0\n", pos)) != std::string::npos) {
        ++zero_lines;
        pos += 3;
    }
    CHECK(zero_lines == inst.clauses.size());
}

TEST_CASE("solver verdicts match the brute-force oracle at desk scale") {
    std::mt19937 rng(43);
    int agreements = 0;
    for (int trial = 0; trial < 250; ++trial) {
        int groups = 2 + static_cast<int>(rng() % 3);
        std::vector<std::vector<std::string>> raw;
        std::vector<std::vector<oracle::Row>> oracle_groups(groups);
        for (int g = 0; g < groups; ++g) {
            int rows = 2 + static_cast<int>(rng() % 3);
            for (int i = 0; i < rows; ++i) {
                int a = static_cast<int>(rng() % 4);
                int b = static_cast<int>(rng() % 4);
                raw.push_back({"g" + std::to_string(g), "a" + std::to_string(a),
                               "b" + std::to_string(b)});
                oracle_groups[g].push_back({a, b});
            }
        }
        Relation rel = make_relation(raw, {"g", "a", "b"});
        IIUnconditionalOutcome out = validate_ii_unconditional(rel, {0}, 1, 2);
        REQUIRE(out.status != IIUncondStatus::Undecided);
        bool brute = oracle::unconditional_feasible(oracle_groups, false);
        CHECK((out.status == IIUncondStatus::Valid) == brute);
        ++agreements;
    }
    CHECK(agreements == 250);
}
