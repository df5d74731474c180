#pragma once

#include <utility>
#include <vector>

#include "domord/orders.hpp"
#include "domord/relation.hpp"

namespace domord {

// Value co-occurrence graph between two attributes within one partition
// group. Edges are deduplicated; multiplicities carry no information here.
struct BipartiteGraph {
    std::string left_attribute, right_attribute;
    std::vector<int> left_values, right_values;    // sorted distinct vids
    std::vector<std::pair<int, int>> edges;        // sorted (left vid, right vid)

    int degree_left(int v) const;
    int degree_right(int v) const;
    bool empty() const { return left_values.empty() && right_values.empty(); }
};

BipartiteGraph build_bipartite(const Relation& rel, const std::vector<long>& rows, int a, int b);

// Single-pass removal of degree-1 nodes and their edges (no iteration).
BipartiteGraph simplify_singletons(const BipartiteGraph& bg);

// Valid iff the simplified graph has no node of degree >= 3 and no cycle.
bool check_bg_valid(const BipartiteGraph& bg_prime);

// One zig-zag walk of a simplified-graph component, both side chains.
struct ChainPair {
    std::vector<int> chain_a, chain_b;
    std::vector<std::pair<int, int>> walk;  // (side 0=left/1=right, value), traversal order
    bool polarity_arbitrary = true;
};

std::vector<ChainPair> derive_chains(const BipartiteGraph& bg_prime);

struct ComponentOrders {
    WeakOrder left, right;
};

// Weak total orders per component after placing each singleton in the gap
// its unique neighbor dictates. Edges of `bg` that lost both endpoints to
// singleton removal come back as their own orderless components.
std::vector<ComponentOrders> reinsert_singletons(const std::vector<ChainPair>& chains,
                                                 const BipartiteGraph& bg);

struct IIResult {
    bool valid = false;
    bool masked = false;  // FD present: strongest derivable orders are empty
    Partition context_partition;
    std::vector<std::pair<int, std::vector<ComponentOrders>>> per_group;
};

IIResult validate_ii_conditional(const Relation& rel, const std::vector<int>& context, int a,
                                 int b);

// FD context+{A} -> B (or symmetric): valid with empty orders on both sides.
IIResult ii_od_conditional(const Relation& rel, const std::vector<int>& context, int a, int b);

}  // namespace domord
