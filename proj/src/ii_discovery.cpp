#include "domord/ii_discovery.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace domord {

int BipartiteGraph::degree_left(int v) const {
    int d = 0;
    for (const auto& e : edges) d += e.first == v;
    return d;
}

int BipartiteGraph::degree_right(int v) const {
    int d = 0;
    for (const auto& e : edges) d += e.second == v;
    return d;
}

BipartiteGraph build_bipartite(const Relation& rel, const std::vector<long>& rows, int a,
                               int b) {
    BipartiteGraph bg;
    bg.left_attribute = rel.attribute(a).name;
    bg.right_attribute = rel.attribute(b).name;
    for (long r : rows) bg.edges.emplace_back(rel.value_id(a, r), rel.value_id(b, r));
    std::sort(bg.edges.begin(), bg.edges.end());
    bg.edges.erase(std::unique(bg.edges.begin(), bg.edges.end()), bg.edges.end());
    for (const auto& [l, rr] : bg.edges) {
        bg.left_values.push_back(l);
        bg.right_values.push_back(rr);
    }
    auto dedup = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(bg.left_values);
    dedup(bg.right_values);
    return bg;
}

namespace {

struct Degrees {
    std::unordered_map<int, int> left, right;
    explicit Degrees(const BipartiteGraph& bg) {
        for (const auto& [l, r] : bg.edges) {
            ++left[l];
            ++right[r];
        }
    }
};

}  // namespace

BipartiteGraph simplify_singletons(const BipartiteGraph& bg) {
    Degrees deg(bg);
    BipartiteGraph out;
    out.left_attribute = bg.left_attribute;
    out.right_attribute = bg.right_attribute;
    for (int v : bg.left_values)
        if (deg.left[v] != 1) out.left_values.push_back(v);
    for (int v : bg.right_values)
        if (deg.right[v] != 1) out.right_values.push_back(v);
    for (const auto& [l, r] : bg.edges)
        if (deg.left[l] != 1 && deg.right[r] != 1) out.edges.emplace_back(l, r);
    return out;
}

namespace {

// Node key for component bookkeeping: side in the low bit.
inline long node_key(int side, int value) { return (static_cast<long>(value) << 1) | side; }

struct NodeGraph {
    std::vector<long> nodes;                         // sorted keys
    std::unordered_map<long, std::vector<long>> adj;

    explicit NodeGraph(const BipartiteGraph& bg) {
        for (int v : bg.left_values) nodes.push_back(node_key(0, v));
        for (int v : bg.right_values) nodes.push_back(node_key(1, v));
        std::sort(nodes.begin(), nodes.end());
        for (const auto& [l, r] : bg.edges) {
            adj[node_key(0, l)].push_back(node_key(1, r));
            adj[node_key(1, r)].push_back(node_key(0, l));
        }
        for (auto& [k, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());
    }

    int degree(long key) const {
        auto it = adj.find(key);
        return it == adj.end() ? 0 : static_cast<int>(it->second.size());
    }
};

}  // namespace

bool check_bg_valid(const BipartiteGraph& bg_prime) {
    NodeGraph g(bg_prime);
    for (long n : g.nodes)
        if (g.degree(n) >= 3) return false;
    // Cycle test: a connected component with max degree 2 is a path iff
    // edge count is below node count; equality means a cycle.
    std::unordered_map<long, long> comp_nodes, comp_edges;
    std::unordered_map<long, long> root;
    std::function<long(long)> find = [&](long x) {
        while (root[x] != x) {
            root[x] = root[root[x]];
            x = root[x];
        }
        return x;
    };
    for (long n : g.nodes) root[n] = n;
    for (const auto& [l, r] : bg_prime.edges) {
        long a = find(node_key(0, l)), b = find(node_key(1, r));
        if (a == b) return false;  // edge closes a cycle
        root[a] = b;
    }
    return true;
}

std::vector<ChainPair> derive_chains(const BipartiteGraph& bg_prime) {
    if (!check_bg_valid(bg_prime))
        throw contract_error("derive_chains requires a valid simplified bipartite graph");
    NodeGraph g(bg_prime);
    std::unordered_set<long> visited;
    std::vector<ChainPair> chains;

    // Components keyed for deterministic output: smallest left value first,
    // right-only components after, by smallest right value.
    std::vector<std::pair<std::pair<int, long>, long>> starts;
    {
        std::unordered_map<long, long> root;
        std::function<long(long)> find = [&](long x) {
            while (root[x] != x) {
                root[x] = root[root[x]];
                x = root[x];
            }
            return x;
        };
        for (long n : g.nodes) root[n] = n;
        for (const auto& [l, r] : bg_prime.edges) root[find(node_key(0, l))] = find(node_key(1, r));
        std::map<long, std::vector<long>> comps;
        for (long n : g.nodes) comps[find(n)].push_back(n);
        for (auto& [rt, members] : comps) {
            std::sort(members.begin(), members.end());
            long best_left = -1, best_right = -1;
            for (long m : members) {
                if ((m & 1) == 0 && best_left < 0) best_left = m >> 1;
                if ((m & 1) == 1 && best_right < 0) best_right = m >> 1;
            }
            std::pair<int, long> key =
                best_left >= 0 ? std::make_pair(0, best_left) : std::make_pair(1, best_right);
            // Walk start: a degree-1 endpoint, smallest key for determinism.
            long start = -1;
            for (long m : members)
                if (g.degree(m) <= 1) {
                    start = m;
                    break;
                }
            if (start < 0) start = members.front();  // unreachable on valid input
            starts.push_back({key, start});
        }
        std::sort(starts.begin(), starts.end());
    }

    for (const auto& [key, start] : starts) {
        ChainPair cp;
        long current = start;
        visited.insert(current);
        cp.walk.emplace_back(static_cast<int>(current & 1), static_cast<int>(current >> 1));
        while (true) {
            long next = -1;
            auto it = g.adj.find(current);
            if (it != g.adj.end()) {
                for (long nbr : it->second)
                    if (!visited.count(nbr)) {
                        next = nbr;
                        break;
                    }
            }
            if (next < 0) break;
            visited.insert(next);
            cp.walk.emplace_back(static_cast<int>(next & 1), static_cast<int>(next >> 1));
            current = next;
        }
        for (const auto& [side, value] : cp.walk)
            (side == 0 ? cp.chain_a : cp.chain_b).push_back(value);
        chains.push_back(std::move(cp));
    }
    return chains;
}

std::vector<ComponentOrders> reinsert_singletons(const std::vector<ChainPair>& chains,
                                                 const BipartiteGraph& bg) {
    Degrees deg(bg);
    // Singleton -> anchor node on the other side.
    std::unordered_map<int, std::vector<int>> left_singles_at;   // right anchor -> left values
    std::unordered_map<int, std::vector<int>> right_singles_at;  // left anchor -> right values
    std::vector<std::pair<int, int>> orphan_pairs;               // both endpoints singleton
    for (const auto& [l, r] : bg.edges) {
        bool ls = deg.left[l] == 1, rs = deg.right[r] == 1;
        if (ls && rs)
            orphan_pairs.emplace_back(l, r);
        else if (ls)
            left_singles_at[r].push_back(l);
        else if (rs)
            right_singles_at[l].push_back(r);
    }
    for (auto& [k, v] : left_singles_at) std::sort(v.begin(), v.end());
    for (auto& [k, v] : right_singles_at) std::sort(v.begin(), v.end());

    std::vector<ComponentOrders> out;
    for (const ChainPair& cp : chains) {
        ComponentOrders co;
        co.left.attribute = bg.left_attribute;
        co.right.attribute = bg.right_attribute;
        for (const auto& [side, value] : cp.walk) {
            if (side == 0) {
                co.left.blocks.push_back({value});
                auto it = right_singles_at.find(value);
                if (it != right_singles_at.end()) co.right.blocks.push_back(it->second);
            } else {
                co.right.blocks.push_back({value});
                auto it = left_singles_at.find(value);
                if (it != left_singles_at.end()) co.left.blocks.push_back(it->second);
            }
        }
        out.push_back(std::move(co));
    }
    for (const auto& [l, r] : orphan_pairs) {
        ComponentOrders co;
        co.left.attribute = bg.left_attribute;
        co.right.attribute = bg.right_attribute;
        co.left.blocks.push_back({l});
        co.right.blocks.push_back({r});
        out.push_back(std::move(co));
    }
    return out;
}

IIResult validate_ii_conditional(const Relation& rel, const std::vector<int>& context, int a,
                                 int b) {
    std::vector<int> involved = context;
    involved.push_back(a);
    involved.push_back(b);
    std::vector<long> rows = rows_without_nulls(rel, involved);

    IIResult res;
    res.context_partition = partition_rows(rel, context, rows);
    for (std::size_t gi = 0; gi < res.context_partition.groups.size(); ++gi) {
        const auto& group = res.context_partition.groups[gi];
        if (group.size() < 2) continue;
        BipartiteGraph bg = build_bipartite(rel, group, a, b);
        BipartiteGraph bgp = simplify_singletons(bg);
        if (!check_bg_valid(bgp)) {
            res.valid = false;
            res.per_group.clear();
            return res;
        }
        auto chains = derive_chains(bgp);
        res.per_group.emplace_back(static_cast<int>(gi), reinsert_singletons(chains, bg));
    }
    res.valid = true;
    return res;
}

IIResult ii_od_conditional(const Relation& rel, const std::vector<int>& context, int a, int b) {
    std::vector<int> involved = context;
    involved.push_back(a);
    involved.push_back(b);
    std::vector<long> rows = rows_without_nulls(rel, involved);
    IIResult res;
    res.context_partition = partition_rows(rel, context, rows);
    res.valid = true;
    res.masked = true;
    return res;
}

}  // namespace domord
