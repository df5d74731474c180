#pragma once

#include <optional>
#include <vector>

#include "domord/orders.hpp"
#include "domord/relation.hpp"

namespace domord {

enum class EIScope { Invalid, Conditional, Unconditional };

struct EIGroupOrder {
    int group = 0;        // index into the context partition's group list
    WeakOrder order;      // derived order over the implicit side in this group
};

struct EIResult {
    EIScope scope = EIScope::Invalid;
    bool fd_left_to_right = false;  // FD context+{A} -> B, i.e. the OD case
    std::vector<EIGroupOrder> per_group;
    std::optional<OrderGraph> union_graph;  // set when scope == Unconditional
    Partition context_partition;
};

// FD A->B and B->A within the rows: the unique strong total order over B,
// as singleton blocks in A's explicit order.
WeakOrder derive_bijective(const Relation& rel, const std::vector<long>& rows, int a, int b);

// FD A->B only: interval partitioning of A by B; nullopt when consecutive
// B-value ranges of A overlap.
std::optional<WeakOrder> derive_interval_partitioning(const Relation& rel,
                                                      const std::vector<long>& rows, int a,
                                                      int b);

// FD B->A only: B values blocked by their unique A value, in A's order.
WeakOrder derive_weak_from_fd(const Relation& rel, const std::vector<long>& rows, int a, int b);

// No FD: infer b_i < b_j for distinct B values co-occurring with consecutive
// groups of tau_A; valid iff the inferred relation is a weak total order.
std::optional<WeakOrder> derive_ei_oc_empty(const Relation& rel, const std::vector<long>& rows,
                                            int a, int b);

EIResult validate_ei(const Relation& rel, const std::vector<int>& context, int a, int b);

}  // namespace domord
