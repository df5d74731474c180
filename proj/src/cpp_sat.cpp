#include "domord/cpp_sat.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace domord {

namespace {

struct VarKey {
    int side, i, j;
    bool operator==(const VarKey& o) const { return side == o.side && i == o.i && j == o.j; }
};

struct VarKeyHash {
    std::size_t operator()(const VarKey& k) const {
        return (static_cast<std::size_t>(k.side) << 60) ^
               (static_cast<std::size_t>(k.i) << 30) ^ static_cast<std::size_t>(k.j);
    }
};

using VarMap = std::unordered_map<VarKey, int, VarKeyHash>;

}  // namespace

int SatInstance::var_of(int side, int i, int j) const {
    for (int v = 0; v < var_count; ++v)
        if (vars[v].side == side && vars[v].i == i && vars[v].j == j) return v + 1;
    return 0;
}

namespace {

// Union-find over small int keys.
struct DSU {
    std::unordered_map<long, long> parent;
    long find(long x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = x;
            return x;
        }
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(long a, long b) { parent[find(a)] = find(b); }
};

// Full total-order pairs of a chain under a polarity.
void chain_pairs(const std::vector<int>& chain, bool reversed, EdgeSet& out) {
    const int n = static_cast<int>(chain.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (reversed)
                out.emplace(chain[j], chain[i]);
            else
                out.emplace(chain[i], chain[j]);
        }
}

bool edges_acyclic(const EdgeSet& edges) {
    OrderGraph g;
    for (const auto& [a, b] : edges) g.add_edge(a, b);
    return is_acyclic(g);
}

}  // namespace

bool precheck_groups(const std::vector<BipartiteGraph>& bgs) {
    std::vector<std::vector<ChainPair>> chains;
    chains.reserve(bgs.size());
    for (const auto& bg : bgs) chains.push_back(derive_chains(simplify_singletons(bg)));
    for (std::size_t i = 0; i < bgs.size(); ++i) {
        for (std::size_t j = i + 1; j < bgs.size(); ++j) {
            for (const ChainPair& ci : chains[i]) {
                for (const ChainPair& cj : chains[j]) {
                    bool compatible = false;
                    for (int pol = 0; pol < 4 && !compatible; ++pol) {
                        bool ri = pol & 1, rj = pol & 2;
                        EdgeSet left, right;
                        chain_pairs(ci.chain_a, ri, left);
                        chain_pairs(cj.chain_a, rj, left);
                        chain_pairs(ci.chain_b, ri, right);
                        chain_pairs(cj.chain_b, rj, right);
                        compatible = edges_acyclic(left) && edges_acyclic(right);
                    }
                    if (!compatible) return false;
                }
            }
        }
    }
    return true;
}

ValueFamilies component_value_sets(const std::vector<BipartiteGraph>& bgs) {
    ValueFamilies fam;
    for (int side = 0; side < 2; ++side) {
        DSU dsu;
        std::vector<int> all;
        for (const auto& bg : bgs) {
            const auto& vals = side == 0 ? bg.left_values : bg.right_values;
            for (std::size_t k = 0; k < vals.size(); ++k) {
                dsu.find(vals[k]);
                if (k > 0) dsu.unite(vals[k - 1], vals[k]);
                all.push_back(vals[k]);
            }
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        std::map<long, std::vector<int>> groups;
        for (int v : all) groups[dsu.find(v)].push_back(v);
        std::vector<std::vector<int>> families;
        for (auto& [root, vals] : groups) {
            std::sort(vals.begin(), vals.end());
            families.push_back(std::move(vals));
        }
        std::sort(families.begin(), families.end(),
                  [](const auto& x, const auto& y) { return x.front() < y.front(); });
        (side == 0 ? fam.left : fam.right) = std::move(families);
    }
    return fam;
}

SatInstance reduce_to_sat(const std::vector<BipartiteGraph>& bgs) {
    ValueFamilies fam = component_value_sets(bgs);
    SatInstance inst;
    VarMap vmap;
    auto declare_side = [&](int side, const std::vector<std::vector<int>>& families) {
        for (const auto& family : families) {
            for (std::size_t x = 0; x < family.size(); ++x) {
                for (std::size_t y = x + 1; y < family.size(); ++y) {
                    int i = family[x], j = family[y];
                    vmap[{side, i, j}] = ++inst.var_count;
                    inst.vars.push_back({side, i, j});
                    vmap[{side, j, i}] = ++inst.var_count;
                    inst.vars.push_back({side, j, i});
                }
            }
        }
    };
    declare_side(0, fam.left);
    declare_side(1, fam.right);

    auto var = [&](int side, int i, int j) { return vmap.at({side, i, j}); };

    // Mutual exclusion: a pair cannot be ordered both ways.
    for (int v = 0; v < inst.var_count; v += 2)
        inst.clauses.push_back({-(v + 1), -(v + 2)});

    // No swaps: two co-occurrence edges in one group force consistent
    // relative order on both sides.
    for (const auto& bg : bgs) {
        const auto& edges = bg.edges;
        for (std::size_t x = 0; x < edges.size(); ++x) {
            for (std::size_t y = x + 1; y < edges.size(); ++y) {
                int u = edges[x].first, t = edges[x].second;
                int v = edges[y].first, w = edges[y].second;
                if (u == v || t == w) continue;
                inst.clauses.push_back({var(0, u, v), var(1, w, t)});
                inst.clauses.push_back({var(0, v, u), var(1, t, w)});
            }
        }
    }

    // Transitivity within each family, both sides.
    auto add_transitivity = [&](int side, const std::vector<std::vector<int>>& families) {
        for (const auto& family : families) {
            const std::size_t n = family.size();
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    if (y == x) continue;
                    for (std::size_t z = 0; z < n; ++z) {
                        if (z == x || z == y) continue;
                        int u = family[x], v = family[y], w = family[z];
                        inst.clauses.push_back({-var(side, u, v), -var(side, v, w), var(side, u, w)});
                    }
                }
        }
    };
    add_transitivity(0, fam.left);
    add_transitivity(1, fam.right);
    return inst;
}

SolveResult solve(const SatInstance& inst, const SolverBudget& budget, unsigned long long seed) {
    SolveResult res;
    const int n = inst.var_count;
    res.assignment.assign(n, 0);
    if (inst.clauses.empty()) {
        res.status = SolveStatus::Sat;
        return res;
    }
    for (const auto& cl : inst.clauses)
        if (cl.empty()) {
            res.status = SolveStatus::Unsat;
            return res;
        }

    // Decision order: variable ids ascending, or a seed-keyed permutation.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    if (seed != 0) {
        unsigned long long s = seed;
        auto next = [&]() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            return s;
        };
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[next() % (i + 1)]);
    }

    // value[v]: -1 unassigned, 0 false, 1 true.
    std::vector<signed char> value(n, -1);
    // Watched literals: watch[lit] lists clause indices; lit = 2*var + (neg?1:0).
    std::vector<std::vector<int>> watch(2 * n);
    std::vector<std::array<int, 2>> watched(inst.clauses.size());
    auto lit_index = [](int lit) { return 2 * (std::abs(lit) - 1) + (lit < 0 ? 1 : 0); };
    auto lit_true = [&](int lit) {
        int v = value[std::abs(lit) - 1];
        if (v < 0) return false;
        return (lit > 0) == (v == 1);
    };
    auto lit_false = [&](int lit) {
        int v = value[std::abs(lit) - 1];
        if (v < 0) return false;
        return (lit > 0) == (v == 0);
    };

    std::vector<int> trail;
    std::vector<int> trail_lim;      // trail size at each decision
    std::vector<signed char> tried;  // per decision: branches taken (1 or 2)
    std::size_t qhead = 0;

    auto enqueue = [&](int lit) {
        int v = std::abs(lit) - 1;
        if (value[v] >= 0) return lit_true(lit);
        value[v] = lit > 0 ? 1 : 0;
        trail.push_back(lit);
        return true;
    };

    // Initialize watches; propagate unit clauses immediately.
    for (std::size_t c = 0; c < inst.clauses.size(); ++c) {
        const auto& cl = inst.clauses[c];
        if (cl.size() == 1) {
            watched[c] = {cl[0], cl[0]};
            if (!enqueue(cl[0])) {
                res.status = SolveStatus::Unsat;
                return res;
            }
            continue;
        }
        watched[c] = {cl[0], cl[1]};
        watch[lit_index(cl[0])].push_back(static_cast<int>(c));
        watch[lit_index(cl[1])].push_back(static_cast<int>(c));
    }

    auto propagate = [&]() -> bool {  // false on conflict
        while (qhead < trail.size()) {
            int lit = trail[qhead++];
            int falsified = -lit;
            auto& wl = watch[lit_index(falsified)];
            std::size_t keep = 0;
            for (std::size_t k = 0; k < wl.size(); ++k) {
                int c = wl[k];
                const auto& cl = inst.clauses[c];
                int other = watched[c][0] == falsified ? watched[c][1] : watched[c][0];
                if (lit_true(other)) {
                    wl[keep++] = c;
                    continue;
                }
                int replacement = 0;
                for (int cand : cl) {
                    if (cand == falsified || cand == other) continue;
                    if (!lit_false(cand)) {
                        replacement = cand;
                        break;
                    }
                }
                if (replacement != 0) {
                    if (watched[c][0] == falsified)
                        watched[c][0] = replacement;
                    else
                        watched[c][1] = replacement;
                    watch[lit_index(replacement)].push_back(c);
                    continue;  // dropped from this watch list
                }
                wl[keep++] = c;
                if (!enqueue(other)) {  // conflict
                    for (std::size_t m = k + 1; m < wl.size(); ++m) wl[keep++] = wl[m];
                    wl.resize(keep);
                    return false;
                }
            }
            wl.resize(keep);
        }
        return true;
    };

    auto backtrack_to = [&](std::size_t lim) {
        while (trail.size() > lim) {
            int lit = trail.back();
            trail.pop_back();
            value[std::abs(lit) - 1] = -1;
        }
        qhead = trail.size();
    };

    const auto t0 = std::chrono::steady_clock::now();
    bool conflict = !propagate();
    while (true) {
        if (conflict) {
            ++res.conflicts;
            if (res.conflicts > budget.max_conflicts ||
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
                    budget.max_seconds) {
                res.status = SolveStatus::Undecided;
                return res;
            }
            // Walk back to the most recent decision with an untried branch.
            while (!trail_lim.empty() && tried.back() == 2) {
                backtrack_to(trail_lim.back());
                trail_lim.pop_back();
                tried.pop_back();
            }
            if (trail_lim.empty()) {
                res.status = SolveStatus::Unsat;
                return res;
            }
            int declit = trail[trail_lim.back()];
            backtrack_to(trail_lim.back());
            trail_lim.back() = static_cast<int>(trail.size());
            tried.back() = 2;
            enqueue(-declit);  // second branch: the flipped value
            conflict = !propagate();
            continue;
        }
        int pick = -1;
        for (int v : order)
            if (value[v] < 0) {
                pick = v;
                break;
            }
        if (pick < 0) break;  // complete assignment
        ++res.decisions;
        trail_lim.push_back(static_cast<int>(trail.size()));
        tried.push_back(1);
        enqueue(-(pick + 1));  // false branch first
        conflict = !propagate();
    }
    res.status = SolveStatus::Sat;
    for (int v = 0; v < n; ++v) res.assignment[v] = value[v] == 1;
    return res;
}

std::pair<OrderGraph, OrderGraph> extract_orders(const std::vector<char>& assignment,
                                                 const SatInstance& inst,
                                                 const std::string& left_attr,
                                                 const std::string& right_attr) {
    OrderGraph a, b;
    a.attribute = left_attr;
    b.attribute = right_attr;
    for (int v = 0; v < inst.var_count; ++v) {
        const VarInfo& info = inst.vars[v];
        OrderGraph& g = info.side == 0 ? a : b;
        g.add_vertex(info.i);
        g.add_vertex(info.j);
        if (assignment[v]) g.edges.emplace(info.i, info.j);
    }
    if (!is_acyclic(a) || !is_acyclic(b))
        throw contract_error("extracted orders must be acyclic for a model");
    a.validated = b.validated = true;
    return {std::move(a), std::move(b)};
}

namespace {

inline long nkey(int side, int value) { return (static_cast<long>(value) << 1) | side; }

struct BgIndex {
    std::unordered_map<long, std::vector<long>> adj;
    std::unordered_map<long, int> comp;
    std::unordered_map<long, int> degree;
    // component -> side -> sorted values
    std::map<int, std::array<std::vector<int>, 2>> comp_values;
    std::array<std::unordered_set<int>, 2> present;

    explicit BgIndex(const BipartiteGraph& bg) {
        for (const auto& [l, r] : bg.edges) {
            adj[nkey(0, l)].push_back(nkey(1, r));
            adj[nkey(1, r)].push_back(nkey(0, l));
        }
        for (auto& [k, nbrs] : adj) {
            std::sort(nbrs.begin(), nbrs.end());
            degree[k] = static_cast<int>(nbrs.size());
        }
        int next = 0;
        for (int v : bg.left_values) label(nkey(0, v), next);
        for (int v : bg.right_values) label(nkey(1, v), next);
        for (int v : bg.left_values) present[0].insert(v);
        for (int v : bg.right_values) present[1].insert(v);
    }

    void label(long start, int& next) {
        if (comp.count(start)) return;
        int c = next++;
        std::deque<long> q{start};
        comp[start] = c;
        while (!q.empty()) {
            long u = q.front();
            q.pop_front();
            comp_values[c][u & 1].push_back(static_cast<int>(u >> 1));
            for (long v : adj[u])
                if (!comp.count(v)) {
                    comp[v] = c;
                    q.push_back(v);
                }
        }
    }

    // Unique tree path between two nodes; empty when disconnected.
    std::vector<long> path(long from, long to) const {
        if (from == to) return {from};
        std::unordered_map<long, long> parent;
        std::deque<long> q{from};
        parent[from] = from;
        while (!q.empty()) {
            long u = q.front();
            q.pop_front();
            auto it = adj.find(u);
            if (it == adj.end()) continue;
            for (long v : it->second) {
                if (parent.count(v)) continue;
                parent[v] = u;
                if (v == to) {
                    std::vector<long> p{v};
                    while (p.back() != from) p.push_back(parent[p.back()]);
                    std::reverse(p.begin(), p.end());
                    return p;
                }
                q.push_back(v);
            }
        }
        return {};
    }
};

}  // namespace

StrongestOrderPair strongest_orders(const std::pair<OrderGraph, OrderGraph>& orders,
                                    const std::vector<BipartiteGraph>& bgs) {
    std::vector<BgIndex> index;
    index.reserve(bgs.size());
    for (const auto& bg : bgs) index.emplace_back(bg);

    StrongestOrderPair out;
    out.order_a.attribute = orders.first.attribute;
    out.order_b.attribute = orders.second.attribute;
    out.order_a.vertices = orders.first.vertices;
    out.order_b.vertices = orders.second.vertices;
    out.order_a.validated = out.order_b.validated = true;

    for (int side = 0; side < 2; ++side) {
        const OrderGraph& model = side == 0 ? orders.first : orders.second;
        OrderGraph& target = side == 0 ? out.order_a : out.order_b;
        for (const auto& [u, v] : model.edges) {
            bool keep = false;
            for (std::size_t i = 0; i < index.size() && !keep; ++i) {
                const BgIndex& bgi = index[i];
                if (!bgi.present[side].count(u) || !bgi.present[side].count(v)) continue;
                long ku = nkey(side, u), kv = nkey(side, v);
                int cu = bgi.comp.at(ku), cv = bgi.comp.at(kv);
                // Condition 1: connecting path holds two nodes of degree >= 2.
                if (cu == cv) {
                    auto p = bgi.path(ku, kv);
                    int strong = 0;
                    for (long node : p) {
                        auto it = bgi.degree.find(node);
                        if (it != bgi.degree.end() && it->second >= 2) ++strong;
                    }
                    if (strong >= 2) keep = true;
                }
                // Condition 2: another group pins both component positions
                // with two distinct same-side values.
                for (std::size_t j = 0; j < index.size() && !keep; ++j) {
                    if (j == i) continue;
                    const BgIndex& bgj = index[j];
                    for (int s2 = 0; s2 < 2 && !keep; ++s2) {
                        bool hit_u = false, hit_v = false;
                        int wit_u = -1;
                        for (int val : bgi.comp_values.at(cu)[s2])
                            if (bgj.present[s2].count(val)) {
                                hit_u = true;
                                wit_u = val;
                                break;
                            }
                        if (!hit_u) continue;
                        for (int val : bgi.comp_values.at(cv)[s2])
                            if (bgj.present[s2].count(val) && val != wit_u) {
                                hit_v = true;
                                break;
                            }
                        // Same component needs two distinct witnesses; with
                        // different components any pair is distinct.
                        if (hit_v)
                            keep = true;
                        else if (cu != cv) {
                            for (int val : bgi.comp_values.at(cv)[s2])
                                if (bgj.present[s2].count(val)) {
                                    keep = true;
                                    break;
                                }
                        }
                    }
                }
            }
            if (keep) target.edges.emplace(u, v);
        }
    }
    return out;
}

IIUnconditionalOutcome validate_ii_unconditional(const Relation& rel,
                                                 const std::vector<int>& context, int a, int b,
                                                 const SolverBudget& budget,
                                                 unsigned long long seed) {
    std::vector<int> involved = context;
    involved.push_back(a);
    involved.push_back(b);
    std::vector<long> rows = rows_without_nulls(rel, involved);

    IIUnconditionalOutcome out;
    out.context_partition = partition_rows(rel, context, rows);

    std::vector<BipartiteGraph> bgs;
    for (const auto& group : out.context_partition.groups) {
        if (group.size() < 2) continue;
        BipartiteGraph bg = build_bipartite(rel, group, a, b);
        if (!check_bg_valid(simplify_singletons(bg))) {
            out.status = IIUncondStatus::Invalid;
            return out;
        }
        bgs.push_back(std::move(bg));
    }
    if (!precheck_groups(bgs)) {
        out.status = IIUncondStatus::Invalid;
        return out;
    }
    SatInstance inst = reduce_to_sat(bgs);
    out.sat_vars = inst.var_count;
    out.sat_clauses = static_cast<long long>(inst.clauses.size());
    out.sat_ran = true;
    SolveResult sr = solve(inst, budget, seed);
    out.sat_conflicts = sr.conflicts;
    if (sr.status == SolveStatus::Undecided) {
        out.status = IIUncondStatus::Undecided;
        return out;
    }
    if (sr.status == SolveStatus::Unsat) {
        out.status = IIUncondStatus::Invalid;
        return out;
    }
    auto extracted =
        extract_orders(sr.assignment, inst, rel.attribute(a).name, rel.attribute(b).name);
    out.orders = strongest_orders(extracted, bgs);
    out.status = IIUncondStatus::Valid;
    return out;
}

void write_dimacs(const SatInstance& inst, std::ostream& os,
                  const std::vector<std::string>& left_names,
                  const std::vector<std::string>& right_names) {
    os << "c order-compatibility reduction\n";
    os << "c variable true means the first value precedes the second\n";
    for (int v = 0; v < inst.var_count; ++v) {
        const VarInfo& info = inst.vars[v];
        const auto& names = info.side == 0 ? left_names : right_names;
        os << "c var " << v + 1 << " = " << (info.side == 0 ? "L" : "R") << " '"
           << names[info.i] << "' < '" << names[info.j] << "'\n";
    }
    os << "p cnf " << inst.var_count << " " << inst.clauses.size() << "\n";
    for (const auto& cl : inst.clauses) {
        for (int lit : cl) os << lit << " ";
        os << "0\n";
    }
}

}  // namespace domord
