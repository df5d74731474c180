#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "domord/util.hpp"

namespace domord {

using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

// Directed precedence relation over distinct value ids of one attribute.
// Irreflexive by construction; acyclicity is established by validate().
struct OrderGraph {
    std::string attribute;
    std::vector<int> vertices;  // sorted value ids
    EdgeSet edges;
    bool validated = false;

    int m() const { return static_cast<int>(vertices.size()); }
    void add_vertex(int v);
    void add_edge(int a, int b);
};

// Ordered disjoint blocks; the induced relation is every cross-block pair in
// block order.
struct WeakOrder {
    std::string attribute;
    std::vector<std::vector<int>> blocks;  // each block sorted

    EdgeSet to_edges() const;
    std::vector<int> values() const;
    bool is_strong_total() const;
    void reverse() { std::reverse(blocks.begin(), blocks.end()); }
};

bool is_acyclic(const OrderGraph& g);

// Block decomposition such that the transitive closure of `inferred` equals
// the cross-block relation over `occurring_values`; nullopt when none exists.
std::optional<WeakOrder> check_weak_total(const EdgeSet& inferred,
                                          const std::vector<int>& occurring_values,
                                          const std::string& attribute = "");

OrderGraph union_order(const std::vector<OrderGraph>& orders);

// Unordered vertex pairs connected by a directed path. Throws contract_error
// on cyclic input.
long long reachable_pair_count(const OrderGraph& g);

// Closure as ordered pairs, vertex-id domain. Throws contract_error on cycles.
EdgeSet transitive_closure(const OrderGraph& g);

OrderGraph graph_from_weak(const WeakOrder& w);

}  // namespace domord
