#include "domord/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <thread>

namespace domord {

std::string kind_to_string(CandidateKind k) {
    switch (k) {
        case CandidateKind::EE_OC: return "EE_OC";
        case CandidateKind::EI_OC: return "EI_OC";
        case CandidateKind::EI_OD: return "EI_OD";
        case CandidateKind::II_OC: return "II_OC";
        case CandidateKind::II_OD: return "II_OD";
        case CandidateKind::OFD: return "OFD";
    }
    return "?";
}

std::string scope_to_string(Scope s) {
    return s == Scope::Conditional ? "conditional" : "unconditional";
}

std::string status_to_string(Status s) {
    switch (s) {
        case Status::Valid: return "valid";
        case Status::Invalid: return "invalid";
        case Status::Undecided: return "undecided";
    }
    return "?";
}

namespace {

bool subset_of(const std::vector<int>& small, const std::vector<int>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool pruned_by_prior(const Candidate& c, const PriorFindings& prior) {
    if (c.kind == CandidateKind::OFD) {
        for (const auto& ctx : prior.ofd_contexts[c.right])
            if (subset_of(ctx, c.context)) return true;
        return false;
    }
    // (a) the pair already holds unconditionally under a smaller context
    auto key = std::minmax(c.left, c.right);
    auto it = prior.unconditional_pairs.find({key.first, key.second});
    if (it != prior.unconditional_pairs.end())
        for (const auto& ctx : it->second)
            if (subset_of(ctx, c.context)) return true;
    // (b)+(c) a recorded FD makes one side constant per context group
    for (int side : {c.left, c.right})
        for (const auto& ctx : prior.ofd_contexts[side])
            if (subset_of(ctx, c.context)) return true;
    return false;
}

std::string candidate_sort_key(const Relation& rel, const Candidate& c) {
    std::string key;
    for (int a : c.context) {
        key += rel.attribute(a).name;
        key += ',';
    }
    key += '|';
    key += c.left >= 0 ? rel.attribute(c.left).name : "";
    key += '|';
    key += rel.attribute(c.right).name;
    key += '|';
    key += kind_to_string(c.kind);
    return key;
}

void enumerate_subsets(const std::vector<int>& pool, int k, std::vector<int>& cur,
                       std::size_t start, const std::function<void(const std::vector<int>&)>& fn) {
    if (static_cast<int>(cur.size()) == k) {
        fn(cur);
        return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
        cur.push_back(pool[i]);
        enumerate_subsets(pool, k, cur, i + 1, fn);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Candidate> prune(std::vector<Candidate> candidates, const PriorFindings& prior) {
    std::vector<Candidate> kept;
    kept.reserve(candidates.size());
    for (auto& c : candidates)
        if (!pruned_by_prior(c, prior)) kept.push_back(std::move(c));
    return kept;
}

std::vector<Candidate> generate_level(int level, const Relation& rel,
                                      const PriorFindings& prior, std::size_t* pruned_out) {
    std::vector<int> pool;
    for (int a = 0; a < rel.attribute_count(); ++a)
        if (rel.attribute(a).role != Role::Ignored) pool.push_back(a);

    std::vector<Candidate> raw;
    if (level >= 2 && level <= static_cast<int>(pool.size())) {
        std::vector<int> cur;
        enumerate_subsets(pool, level, cur, 0, [&](const std::vector<int>& x) {
            for (int a : x) {
                Candidate c;
                c.kind = CandidateKind::OFD;
                c.right = a;
                for (int other : x)
                    if (other != a) c.context.push_back(other);
                raw.push_back(std::move(c));
            }
            for (std::size_t i = 0; i < x.size(); ++i) {
                for (std::size_t j = i + 1; j < x.size(); ++j) {
                    Candidate c;
                    int a = x[i], b = x[j];
                    bool ea = is_explicit(rel.attribute(a).role);
                    bool eb = is_explicit(rel.attribute(b).role);
                    if (ea && eb) {
                        c.kind = CandidateKind::EE_OC;
                        c.left = a;
                        c.right = b;
                    } else if (ea || eb) {
                        c.kind = CandidateKind::EI_OC;
                        c.left = ea ? a : b;
                        c.right = ea ? b : a;
                    } else {
                        c.kind = CandidateKind::II_OC;
                        c.left = a;
                        c.right = b;
                    }
                    for (int other : x)
                        if (other != a && other != b) c.context.push_back(other);
                    raw.push_back(std::move(c));
                }
            }
        });
    }
    std::size_t before = raw.size();
    std::vector<Candidate> kept = prune(std::move(raw), prior);
    if (pruned_out) *pruned_out = before - kept.size();
    std::sort(kept.begin(), kept.end(), [&](const Candidate& x, const Candidate& y) {
        return candidate_sort_key(rel, x) < candidate_sort_key(rel, y);
    });
    return kept;
}

namespace {

std::string group_key(const Relation& rel, const Partition& part, int group,
                      const std::vector<int>& context) {
    if (context.empty()) return "";
    long row = part.groups[group].front();
    std::string key;
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (i) key += '|';
        key += rel.value_string(context[i], rel.value_id(context[i], row));
    }
    return key;
}

nlohmann::ordered_json json_edges(const Relation& rel, int attr, const EdgeSet& edges) {
    std::vector<std::pair<std::string, std::string>> named;
    named.reserve(edges.size());
    for (const auto& [a, b] : edges)
        named.emplace_back(rel.value_string(attr, a), rel.value_string(attr, b));
    std::sort(named.begin(), named.end());
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [a, b] : named) arr.push_back({a, b});
    return arr;
}

nlohmann::ordered_json json_blocks(const Relation& rel, int attr, const WeakOrder& w) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& block : w.blocks) {
        std::vector<std::string> names;
        names.reserve(block.size());
        for (int v : block) names.push_back(rel.value_string(attr, v));
        std::sort(names.begin(), names.end());
        arr.push_back(names);
    }
    return arr;
}

// Reporting polarity: the side chain reads smaller-to-larger between its
// first and last value, judged on the first side with at least two blocks.
void canonicalize_component(const Relation& rel, int a, int b, ComponentOrders& co) {
    auto block_min = [&](int attr, const std::vector<int>& block) {
        std::string best = rel.value_string(attr, block.front());
        for (int v : block) best = std::min(best, rel.value_string(attr, v));
        return best;
    };
    const WeakOrder* anchor = nullptr;
    int attr = a;
    if (co.left.blocks.size() >= 2) {
        anchor = &co.left;
        attr = a;
    } else if (co.right.blocks.size() >= 2) {
        anchor = &co.right;
        attr = b;
    }
    if (!anchor) return;
    if (block_min(attr, anchor->blocks.front()) > block_min(attr, anchor->blocks.back())) {
        co.left.reverse();
        co.right.reverse();
    }
}

OrderGraph side_graph(const std::vector<ComponentOrders>& comps, bool left_side,
                      const std::string& attr) {
    OrderGraph g;
    g.attribute = attr;
    for (const auto& co : comps) {
        const WeakOrder& w = left_side ? co.left : co.right;
        for (const auto& block : w.blocks)
            for (int v : block) g.add_vertex(v);
        for (const auto& e : w.to_edges()) g.edges.insert(e);
    }
    return g;
}

struct EEOutcome {
    bool valid = false;
};

EEOutcome validate_ee(const Relation& rel, const std::vector<int>& context, int a, int b) {
    std::vector<int> involved = context;
    involved.push_back(a);
    involved.push_back(b);
    std::vector<long> rows = rows_without_nulls(rel, involved);
    Partition part = partition_rows(rel, context, rows);
    for (const auto& group : part.groups) {
        std::vector<std::pair<int, int>> rks;
        rks.reserve(group.size());
        for (long r : group)
            rks.emplace_back(rel.explicit_rank(a, rel.value_id(a, r)),
                             rel.explicit_rank(b, rel.value_id(b, r)));
        std::sort(rks.begin(), rks.end());
        int prev_max = -1;
        std::size_t i = 0;
        while (i < rks.size()) {
            std::size_t j = i;
            int run_max = -1;
            while (j < rks.size() && rks[j].first == rks[i].first) {
                run_max = std::max(run_max, rks[j].second);
                ++j;
            }
            if (rks[i].second < prev_max) return {false};  // swap
            prev_max = std::max(prev_max, run_max);
            i = j;
        }
    }
    return {true};
}

}  // namespace

Finding verify_candidate(const Relation& rel, const Candidate& cand, int level,
                         const DiscoveryOptions& opts) {
    Finding f;
    f.candidate = cand;
    f.kind = cand.kind;
    f.level = level;
    f.score = Rational(0, 1);

    if (cand.kind == CandidateKind::OFD) {
        std::vector<int> involved = cand.context;
        involved.push_back(cand.right);
        auto rows = rows_without_nulls(rel, involved);
        f.status = check_fd_rows(rel, cand.context, cand.right, rows) ? Status::Valid
                                                                      : Status::Invalid;
        f.scope = Scope::Unconditional;
        return f;
    }

    if (cand.kind == CandidateKind::EE_OC) {
        f.status = validate_ee(rel, cand.context, cand.left, cand.right).valid ? Status::Valid
                                                                               : Status::Invalid;
        f.scope = Scope::Unconditional;
        return f;
    }

    if (cand.kind == CandidateKind::EI_OC) {
        EIResult res = validate_ei(rel, cand.context, cand.left, cand.right);
        bool want_conditional_report =
            cand.scope_request == ScopeRequest::Conditional ||
            (cand.scope_request == ScopeRequest::Auto && res.scope == EIScope::Conditional);
        if (res.scope == EIScope::Invalid ||
            (cand.scope_request == ScopeRequest::Unconditional &&
             res.scope != EIScope::Unconditional)) {
            f.status = Status::Invalid;
            f.scope = Scope::Unconditional;
            return f;
        }
        f.status = Status::Valid;
        if (res.fd_left_to_right) f.kind = CandidateKind::EI_OD;
        if (!want_conditional_report && res.scope == EIScope::Unconditional) {
            f.scope = Scope::Unconditional;
            nlohmann::ordered_json order;
            if (res.per_group.size() == 1) {
                order["blocks"] = json_blocks(rel, cand.right, res.per_group.front().order);
            } else {
                order["edges"] = json_edges(rel, cand.right, res.union_graph->edges);
            }
            f.orders[rel.attribute(cand.right).name] = std::move(order);
            f.score = pairwise_score(*res.union_graph).value;
        } else {
            f.scope = Scope::Conditional;
            nlohmann::ordered_json groups = nlohmann::ordered_json::array();
            std::vector<OrderGraph> graphs;
            for (const auto& pg : res.per_group) {
                nlohmann::ordered_json entry;
                entry["group"] = group_key(rel, res.context_partition, pg.group, cand.context);
                entry["blocks"] = json_blocks(rel, cand.right, pg.order);
                groups.push_back(std::move(entry));
                graphs.push_back(graph_from_weak(pg.order));
            }
            nlohmann::ordered_json order;
            order["groups"] = std::move(groups);
            f.orders[rel.attribute(cand.right).name] = std::move(order);
            f.score = conditional_score(graphs, rel.distinct_count(cand.right)).value;
        }
        return f;
    }

    // I/I candidate
    std::vector<int> ctx_l = cand.context, ctx_r = cand.context;
    ctx_l.push_back(cand.left);
    ctx_r.push_back(cand.right);
    std::vector<int> involved = ctx_l;
    involved.push_back(cand.right);
    auto rows = rows_without_nulls(rel, involved);
    bool fd_lr = check_fd_rows(rel, ctx_l, cand.right, rows);
    bool fd_rl = check_fd_rows(rel, ctx_r, cand.left, rows);
    const std::string left_name = rel.attribute(cand.left).name;
    const std::string right_name = rel.attribute(cand.right).name;

    auto empty_orders = [&]() {
        nlohmann::ordered_json o;
        o[left_name] = {{"edges", nlohmann::ordered_json::array()}};
        o[right_name] = {{"edges", nlohmann::ordered_json::array()}};
        return o;
    };

    f.polarity = "arbitrary";

    auto report_conditional = [&](Scope scope) {
        // An FD from one side to the other masks all order information:
        // every witness class intersects to the empty order.
        if (fd_lr || fd_rl) {
            f.status = Status::Valid;
            f.kind = CandidateKind::II_OD;
            f.scope = scope;
            f.orders = empty_orders();
            f.score = Rational(0, 1);
            return;
        }
        IIResult res = validate_ii_conditional(rel, cand.context, cand.left, cand.right);
        if (!res.valid) {
            f.status = Status::Invalid;
            f.scope = scope;
            return;
        }
        f.status = Status::Valid;
        f.scope = scope;
        std::vector<OrderGraph> left_graphs, right_graphs;
        nlohmann::ordered_json groups = nlohmann::ordered_json::array();
        for (auto& [gi, comps] : res.per_group) {
            for (auto& co : comps) canonicalize_component(rel, cand.left, cand.right, co);
            nlohmann::ordered_json entry;
            entry["group"] = group_key(rel, res.context_partition, gi, cand.context);
            nlohmann::ordered_json comp_arr = nlohmann::ordered_json::array();
            for (const auto& co : comps) {
                nlohmann::ordered_json cj;
                cj[left_name] = json_blocks(rel, cand.left, co.left);
                cj[right_name] = json_blocks(rel, cand.right, co.right);
                comp_arr.push_back(std::move(cj));
            }
            entry["components"] = std::move(comp_arr);
            groups.push_back(std::move(entry));
            left_graphs.push_back(side_graph(comps, true, left_name));
            right_graphs.push_back(side_graph(comps, false, right_name));
        }
        if (cand.context.empty()) {
            // single group; serialize flat
            f.orders = groups.empty() ? nlohmann::ordered_json::object()
                                      : nlohmann::ordered_json(
                                            {{"components", groups.front()["components"]}});
        } else {
            f.orders["groups"] = std::move(groups);
        }
        Rational sl = conditional_score(left_graphs, rel.distinct_count(cand.left)).value;
        Rational sr = conditional_score(right_graphs, rel.distinct_count(cand.right)).value;
        f.score = (sl + sr) / 2;
    };

    if (cand.context.empty()) {
        report_conditional(Scope::Unconditional);
        return f;
    }

    if (cand.scope_request != ScopeRequest::Conditional) {
        IIUnconditionalOutcome out =
            validate_ii_unconditional(rel, cand.context, cand.left, cand.right, opts.budget,
                                      opts.seed);
        f.sat_ran = out.sat_ran;
        f.sat_conflicts = out.sat_conflicts;
        if (out.status == IIUncondStatus::Undecided) {
            f.status = Status::Undecided;
            f.scope = Scope::Unconditional;
            return f;
        }
        if (out.status == IIUncondStatus::Valid) {
            f.status = Status::Valid;
            f.scope = Scope::Unconditional;
            if (fd_lr || fd_rl) f.kind = CandidateKind::II_OD;
            f.orders[left_name] = {{"edges", json_edges(rel, cand.left, out.orders.order_a.edges)}};
            f.orders[right_name] = {
                {"edges", json_edges(rel, cand.right, out.orders.order_b.edges)}};
            Rational sl = pairwise_score(out.orders.order_a).value;
            Rational sr = pairwise_score(out.orders.order_b).value;
            f.score = (sl + sr) / 2;
            return f;
        }
        if (cand.scope_request == ScopeRequest::Unconditional) {
            f.status = Status::Invalid;
            f.scope = Scope::Unconditional;
            return f;
        }
    }
    report_conditional(Scope::Conditional);
    return f;
}

RunReport run_discovery(const Relation& rel, const DiscoveryOptions& opts) {
    RunReport report;
    PriorFindings prior;
    prior.resize(rel.attribute_count());

    const int max_level = std::min(opts.max_level, rel.attribute_count());
    for (int level = 2; level <= max_level; ++level) {
        auto t0 = std::chrono::steady_clock::now();
        LevelStats stats;
        stats.level = level;
        std::vector<Candidate> candidates = generate_level(level, rel, prior, &stats.pruned);
        stats.candidates = candidates.size();

        std::vector<Finding> results(candidates.size());
        const int workers =
            std::max(1, std::min<int>(opts.threads, static_cast<int>(candidates.size())));
        if (workers <= 1) {
            for (std::size_t i = 0; i < candidates.size(); ++i)
                results[i] = verify_candidate(rel, candidates[i], level, opts);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&]() {
                    while (true) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= candidates.size()) break;
                        results[i] = verify_candidate(rel, candidates[i], level, opts);
                    }
                });
            }
            for (auto& t : pool) t.join();
        }

        // Level barrier: merge in deterministic candidate order, then index
        // the newly found dependencies for the next level's pruning.
        for (Finding& f : results) {
            if (f.status == Status::Undecided) report.has_undecided = true;
            if (f.sat_ran) {
                ++stats.sat_instances;
                stats.sat_conflicts += f.sat_conflicts;
            }
            if (f.status == Status::Valid) {
                if (f.kind == CandidateKind::OFD) {
                    prior.ofd_contexts[f.candidate.right].push_back(f.candidate.context);
                } else if (f.scope == Scope::Unconditional) {
                    auto key = std::minmax(f.candidate.left, f.candidate.right);
                    prior.unconditional_pairs[{key.first, key.second}].push_back(
                        f.candidate.context);
                }
            }
            report.findings.push_back(std::move(f));
        }
        stats.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        report.levels.push_back(stats);
    }
    return report;
}

nlohmann::ordered_json finding_to_json(const Relation& rel, const Finding& f) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json ctx = nlohmann::ordered_json::array();
    for (int a : f.candidate.context) ctx.push_back(rel.attribute(a).name);
    j["context"] = std::move(ctx);
    j["left"] = f.candidate.left >= 0 ? rel.attribute(f.candidate.left).name : "";
    j["right"] = rel.attribute(f.candidate.right).name;
    j["kind"] = kind_to_string(f.kind);
    j["scope"] = scope_to_string(f.scope);
    j["status"] = status_to_string(f.status);
    j["orders"] = f.orders;
    j["score"] = f.score.to_decimal6();
    j["level"] = f.level;
    j["polarity"] = f.polarity;
    return j;
}

nlohmann::ordered_json findings_to_json(const Relation& rel, const std::vector<Finding>& fs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Finding& f : fs) arr.push_back(finding_to_json(rel, f));
    return arr;
}

nlohmann::ordered_json stats_to_json(const RunReport& report) {
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const LevelStats& s : report.levels) {
        nlohmann::ordered_json j;
        j["level"] = s.level;
        j["candidates"] = s.candidates;
        j["pruned"] = s.pruned;
        j["runtime_ms"] = s.runtime_ms;
        j["sat_instances"] = s.sat_instances;
        j["sat_conflicts"] = s.sat_conflicts;
        levels.push_back(std::move(j));
    }
    nlohmann::ordered_json j;
    j["levels"] = std::move(levels);
    j["undecided"] = report.has_undecided;
    return j;
}

std::vector<std::size_t> rank_order(const Relation& rel, const std::vector<Finding>& findings,
                                    std::size_t k) {
    std::vector<std::size_t> idx(findings.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        const Finding& a = findings[x];
        const Finding& b = findings[y];
        if (!(a.score == b.score)) return b.score < a.score;
        if (a.candidate.context.size() != b.candidate.context.size())
            return a.candidate.context.size() < b.candidate.context.size();
        return candidate_sort_key(rel, a.candidate) < candidate_sort_key(rel, b.candidate);
    });
    if (k < idx.size()) idx.resize(k);
    return idx;
}

}  // namespace domord
