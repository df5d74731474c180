#include "domord/orders.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace domord {

void OrderGraph::add_vertex(int v) {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v) vertices.insert(it, v);
}

void OrderGraph::add_edge(int a, int b) {
    if (a == b) throw contract_error("self-loop rejected: order relations are irreflexive");
    add_vertex(a);
    add_vertex(b);
    edges.emplace(a, b);
}

EdgeSet WeakOrder::to_edges() const {
    EdgeSet edges;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            for (int a : blocks[i])
                for (int b : blocks[j]) edges.emplace(a, b);
    return edges;
}

std::vector<int> WeakOrder::values() const {
    std::vector<int> vs;
    for (const auto& b : blocks) vs.insert(vs.end(), b.begin(), b.end());
    std::sort(vs.begin(), vs.end());
    return vs;
}

bool WeakOrder::is_strong_total() const {
    for (const auto& b : blocks)
        if (b.size() != 1) return false;
    return true;
}

namespace {

struct Adjacency {
    std::vector<int> vertices;
    std::unordered_map<int, int> index;
    std::vector<std::vector<int>> out;

    explicit Adjacency(const OrderGraph& g) : vertices(g.vertices) {
        for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);
        out.resize(vertices.size());
        for (const auto& [a, b] : g.edges) out[index.at(a)].push_back(index.at(b));
    }
};

// Reverse topological order, or nullopt on a cycle. Iterative 3-color DFS.
std::optional<std::vector<int>> topo_postorder(const Adjacency& adj) {
    const int n = static_cast<int>(adj.vertices.size());
    std::vector<int> color(n, 0);
    std::vector<int> post;
    post.reserve(n);
    for (int start = 0; start < n; ++start) {
        if (color[start] != 0) continue;
        std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
        color[start] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            if (next < adj.out[u].size()) {
                int v = adj.out[u][next++];
                if (color[v] == 1) return std::nullopt;
                if (color[v] == 0) {
                    color[v] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                color[u] = 2;
                post.push_back(u);
                stack.pop_back();
            }
        }
    }
    return post;
}

using Bitset = std::vector<unsigned long long>;

long long popcount(const Bitset& b) {
    long long c = 0;
    for (auto w : b) c += __builtin_popcountll(w);
    return c;
}

// Descendant bitsets in reverse topological order.
std::vector<Bitset> descendant_sets(const Adjacency& adj, const std::vector<int>& post) {
    const int n = static_cast<int>(adj.vertices.size());
    const int words = (n + 63) / 64;
    std::vector<Bitset> desc(n, Bitset(words, 0));
    for (int u : post) {
        for (int v : adj.out[u]) {
            desc[u][v / 64] |= 1ull << (v % 64);
            for (int w = 0; w < words; ++w) desc[u][w] |= desc[v][w];
        }
    }
    return desc;
}

}  // namespace

bool is_acyclic(const OrderGraph& g) {
    Adjacency adj(g);
    return topo_postorder(adj).has_value();
}

long long reachable_pair_count(const OrderGraph& g) {
    Adjacency adj(g);
    auto post = topo_postorder(adj);
    if (!post) throw contract_error("reachable_pair_count requires an acyclic graph");
    auto desc = descendant_sets(adj, *post);
    long long pairs = 0;
    for (const auto& d : desc) pairs += popcount(d);
    return pairs;
}

EdgeSet transitive_closure(const OrderGraph& g) {
    Adjacency adj(g);
    auto post = topo_postorder(adj);
    if (!post) throw contract_error("transitive_closure requires an acyclic graph");
    auto desc = descendant_sets(adj, *post);
    EdgeSet closure;
    const int n = static_cast<int>(adj.vertices.size());
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (desc[u][v / 64] >> (v % 64) & 1) closure.emplace(adj.vertices[u], adj.vertices[v]);
    return closure;
}

std::optional<WeakOrder> check_weak_total(const EdgeSet& inferred,
                                          const std::vector<int>& occurring_values,
                                          const std::string& attribute) {
    OrderGraph g;
    g.attribute = attribute;
    g.vertices = occurring_values;
    std::sort(g.vertices.begin(), g.vertices.end());
    g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
    for (const auto& [a, b] : inferred) {
        if (a == b) return std::nullopt;
        g.add_edge(a, b);
    }
    if (!is_acyclic(g)) return std::nullopt;
    EdgeSet closure = transitive_closure(g);

    // Group values by (predecessors, successors) signature in the closure;
    // a weak total order is exactly a relation whose signature classes are
    // totally ordered blocks.
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<int>> classes;
    for (int v : g.vertices) {
        std::vector<int> preds, succs;
        for (const auto& [a, b] : closure) {
            if (a == v) succs.push_back(b);
            if (b == v) preds.push_back(a);
        }
        classes[{std::move(preds), std::move(succs)}].push_back(v);
    }
    std::vector<std::vector<int>> blocks;
    blocks.reserve(classes.size());
    for (auto& [sig, vals] : classes) blocks.push_back(vals);
    std::sort(blocks.begin(), blocks.end(), [&](const auto& x, const auto& y) {
        // Earlier block = more successors; break ties by first value id so the
        // sort is total even on inputs about to be rejected.
        auto succ_count = [&](int v) {
            long c = 0;
            for (const auto& [a, b] : closure)
                if (a == v) ++c;
            return c;
        };
        long sx = succ_count(x.front()), sy = succ_count(y.front());
        if (sx != sy) return sx > sy;
        return x.front() < y.front();
    });
    WeakOrder w;
    w.attribute = attribute;
    w.blocks = std::move(blocks);
    for (auto& b : w.blocks) std::sort(b.begin(), b.end());
    return w.to_edges() == closure ? std::optional<WeakOrder>(std::move(w)) : std::nullopt;
}

OrderGraph union_order(const std::vector<OrderGraph>& orders) {
    OrderGraph u;
    for (const auto& g : orders) {
        if (u.attribute.empty()) u.attribute = g.attribute;
        for (int v : g.vertices) u.add_vertex(v);
        for (const auto& e : g.edges) u.edges.insert(e);
    }
    return u;
}

OrderGraph graph_from_weak(const WeakOrder& w) {
    OrderGraph g;
    g.attribute = w.attribute;
    for (const auto& b : w.blocks)
        for (int v : b) g.add_vertex(v);
    g.edges = w.to_edges();
    return g;
}

}  // namespace domord
