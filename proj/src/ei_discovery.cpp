#include "domord/ei_discovery.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace domord {

namespace {

std::vector<long> sort_rows_by_rank(const Relation& rel, std::vector<long> rows, int a) {
    std::sort(rows.begin(), rows.end(), [&](long x, long y) {
        int rx = rel.explicit_rank(a, rel.value_id(a, x));
        int ry = rel.explicit_rank(a, rel.value_id(a, y));
        if (rx != ry) return rx < ry;
        return x < y;
    });
    return rows;
}

}  // namespace

WeakOrder derive_bijective(const Relation& rel, const std::vector<long>& rows, int a, int b) {
    auto sorted = sort_rows_by_rank(rel, rows, a);
    WeakOrder w;
    w.attribute = rel.attribute(b).name;
    std::unordered_set<int> seen_b;
    int prev_b = -1;
    int prev_a = -1;
    bool first = true;
    for (long r : sorted) {
        int vb = rel.value_id(b, r);
        int va = rel.value_id(a, r);
        if (!first && vb == prev_b) {
            if (va != prev_a) throw contract_error("derive_bijective requires FD B->A");
            continue;
        }
        if (!first && va == prev_a) throw contract_error("derive_bijective requires FD A->B");
        if (!seen_b.insert(vb).second) throw contract_error("derive_bijective requires FD B->A");
        w.blocks.push_back({vb});
        prev_b = vb;
        prev_a = va;
        first = false;
    }
    return w;
}

std::optional<WeakOrder> derive_interval_partitioning(const Relation& rel,
                                                      const std::vector<long>& rows, int a,
                                                      int b) {
    // min/max A-rank per B value, single pass.
    std::unordered_map<int, std::pair<int, int>> range;  // vb -> (min, max)
    for (long r : rows) {
        int vb = rel.value_id(b, r);
        int rank = rel.explicit_rank(a, rel.value_id(a, r));
        auto [it, inserted] = range.emplace(vb, std::make_pair(rank, rank));
        if (!inserted) {
            it->second.first = std::min(it->second.first, rank);
            it->second.second = std::max(it->second.second, rank);
        }
    }
    std::vector<std::pair<int, std::pair<int, int>>> order(range.begin(), range.end());
    std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
        if (x.second.first != y.second.first) return x.second.first < y.second.first;
        return x.first < y.first;
    });
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        if (order[i + 1].second.first < order[i].second.second) return std::nullopt;
    WeakOrder w;
    w.attribute = rel.attribute(b).name;
    for (const auto& [vb, rng] : order) w.blocks.push_back({vb});
    return w;
}

WeakOrder derive_weak_from_fd(const Relation& rel, const std::vector<long>& rows, int a, int b) {
    // Each B value pairs with exactly one A value; blocks keyed by A rank.
    std::unordered_map<int, int> b_to_rank;
    std::unordered_map<int, std::vector<int>> rank_to_bs;
    for (long r : rows) {
        int vb = rel.value_id(b, r);
        int rank = rel.explicit_rank(a, rel.value_id(a, r));
        auto [it, inserted] = b_to_rank.emplace(vb, rank);
        if (!inserted) {
            if (it->second != rank)
                throw contract_error("derive_weak_from_fd requires FD B->A within the group");
            continue;
        }
        rank_to_bs[rank].push_back(vb);
    }
    std::vector<int> ranks;
    ranks.reserve(rank_to_bs.size());
    for (const auto& [rank, bs] : rank_to_bs) ranks.push_back(rank);
    std::sort(ranks.begin(), ranks.end());
    WeakOrder w;
    w.attribute = rel.attribute(b).name;
    for (int rank : ranks) {
        auto block = rank_to_bs[rank];
        std::sort(block.begin(), block.end());
        w.blocks.push_back(std::move(block));
    }
    return w;
}

std::optional<WeakOrder> derive_ei_oc_empty(const Relation& rel, const std::vector<long>& rows,
                                            int a, int b) {
    // B-value sets of tau_A's groups, in explicit A order.
    auto sorted = sort_rows_by_rank(rel, rows, a);
    std::vector<std::vector<int>> group_bs;  // deduped per group
    int prev_rank = -1;
    for (long r : sorted) {
        int rank = rel.explicit_rank(a, rel.value_id(a, r));
        if (rank != prev_rank) {
            group_bs.emplace_back();
            prev_rank = rank;
        }
        group_bs.back().push_back(rel.value_id(b, r));
    }
    for (auto& g : group_bs) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    }
    const int p = static_cast<int>(group_bs.size());

    // Fast structural test from the constructive side: every value's
    // occurrences span a contiguous group interval, consecutive groups share
    // at most one value, and a value spanning three or more groups leaves no
    // room for others in the middle ones.
    std::unordered_map<int, std::pair<int, int>> span;  // vb -> (first, last)
    std::unordered_map<int, int> group_hits;
    bool structurally_valid = true;
    for (int i = 0; i < p && structurally_valid; ++i) {
        for (int vb : group_bs[i]) {
            auto [it, inserted] = span.emplace(vb, std::make_pair(i, i));
            if (!inserted) {
                if (i != it->second.second + 1 && i != it->second.second)
                    structurally_valid = false;  // gap in the occurrence interval
                it->second.second = i;
            }
            ++group_hits[vb];
        }
    }
    if (structurally_valid) {
        for (const auto& [vb, fl] : span)
            if (group_hits[vb] != fl.second - fl.first + 1) structurally_valid = false;
    }
    if (structurally_valid) {
        for (int i = 0; i + 1 < p && structurally_valid; ++i) {
            int shared = 0;
            std::unordered_set<int> next(group_bs[i + 1].begin(), group_bs[i + 1].end());
            for (int vb : group_bs[i])
                if (next.count(vb)) ++shared;
            if (shared > 1) structurally_valid = false;
        }
    }
    if (structurally_valid) {
        for (const auto& [vb, fl] : span) {
            if (fl.second - fl.first < 2) continue;
            for (int i = fl.first + 1; i < fl.second && structurally_valid; ++i)
                if (group_bs[i].size() != 1) structurally_valid = false;
        }
    }
    if (!structurally_valid) return std::nullopt;

    // Inferred relation B[tau_A]; the declarative weak-total check is the
    // authoritative verdict.
    EdgeSet inferred;
    for (int i = 0; i + 1 < p; ++i)
        for (int u : group_bs[i])
            for (int v : group_bs[i + 1])
                if (u != v) inferred.emplace(u, v);
    std::vector<int> values;
    for (const auto& [vb, fl] : span) values.push_back(vb);
    return check_weak_total(inferred, values, rel.attribute(b).name);
}

EIResult validate_ei(const Relation& rel, const std::vector<int>& context, int a, int b) {
    if (!is_explicit(rel.attribute(a).role))
        throw contract_error("validate_ei: left attribute must have an explicit order");

    std::vector<int> involved = context;
    involved.push_back(a);
    involved.push_back(b);
    std::vector<long> rows = rows_without_nulls(rel, involved);

    EIResult res;
    res.context_partition = partition_rows(rel, context, rows);

    std::vector<int> ctx_a = context;
    ctx_a.push_back(a);
    std::vector<int> ctx_b = context;
    ctx_b.push_back(b);
    bool fd_ab = check_fd_rows(rel, ctx_a, b, rows);
    bool fd_ba = check_fd_rows(rel, ctx_b, a, rows);
    res.fd_left_to_right = fd_ab;

    for (std::size_t gi = 0; gi < res.context_partition.groups.size(); ++gi) {
        const auto& group = res.context_partition.groups[gi];
        if (group.size() < 2) continue;
        std::optional<WeakOrder> derived;
        if (fd_ab && fd_ba)
            derived = derive_bijective(rel, group, a, b);
        else if (fd_ab)
            derived = derive_interval_partitioning(rel, group, a, b);
        else if (fd_ba)
            derived = derive_weak_from_fd(rel, group, a, b);
        else
            derived = derive_ei_oc_empty(rel, group, a, b);
        if (!derived) {
            res.scope = EIScope::Invalid;
            res.per_group.clear();
            return res;
        }
        res.per_group.push_back({static_cast<int>(gi), std::move(*derived)});
    }

    res.scope = EIScope::Conditional;
    std::vector<OrderGraph> graphs;
    graphs.reserve(res.per_group.size());
    for (const auto& pg : res.per_group) graphs.push_back(graph_from_weak(pg.order));
    OrderGraph u = union_order(graphs);
    u.attribute = rel.attribute(b).name;
    if (is_acyclic(u)) {
        u.validated = true;
        res.union_graph = std::move(u);
        res.scope = EIScope::Unconditional;
    }
    return res;
}

}  // namespace domord
