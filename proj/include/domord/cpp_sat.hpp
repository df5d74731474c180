#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "domord/ii_discovery.hpp"
#include "domord/orders.hpp"
#include "domord/relation.hpp"

namespace domord {

struct VarInfo {
    int side;  // 0 = left attribute, 1 = right attribute
    int i, j;  // value ids: variable true means i precedes j
};

struct SatInstance {
    int var_count = 0;
    std::vector<std::vector<int>> clauses;  // DIMACS-style literals, +-var (1-based)
    std::vector<VarInfo> vars;              // [var-1] -> meaning

    int var_of(int side, int i, int j) const;  // 0 when absent
};

// Coarse pairwise compatibility of the simplified graphs' chain pairs; false
// proves the candidate unsatisfiable before any clauses are built.
bool precheck_groups(const std::vector<BipartiteGraph>& bgs);

// Same-side values co-appearing in any partition group share a family;
// variables and transitivity clauses stay within families.
struct ValueFamilies {
    std::vector<std::vector<int>> left, right;  // each family sorted; families by min value
};

ValueFamilies component_value_sets(const std::vector<BipartiteGraph>& bgs);

SatInstance reduce_to_sat(const std::vector<BipartiteGraph>& bgs);

struct SolverBudget {
    long long max_conflicts = 1'000'000;
    double max_seconds = 10.0;
};

enum class SolveStatus { Sat, Unsat, Undecided };

struct SolveResult {
    SolveStatus status = SolveStatus::Undecided;
    std::vector<char> assignment;  // [var-1] -> 0/1, valid when Sat
    long long conflicts = 0;
    long long decisions = 0;
};

// Unit propagation with conflict-driven chronological backtracking; decisions
// take the lowest unassigned variable, false branch first. Deterministic for
// a fixed seed (a nonzero seed permutes the decision order).
SolveResult solve(const SatInstance& inst, const SolverBudget& budget = {},
                  unsigned long long seed = 0);

std::pair<OrderGraph, OrderGraph> extract_orders(const std::vector<char>& assignment,
                                                 const SatInstance& inst,
                                                 const std::string& left_attr,
                                                 const std::string& right_attr);

struct StrongestOrderPair {
    OrderGraph order_a, order_b;
};

// Drops every ordered pair that some transposition within the witness class
// could reverse; keeps a pair in group i when its connecting path there has
// two nodes of degree >= 2, or another group pins both component positions.
StrongestOrderPair strongest_orders(const std::pair<OrderGraph, OrderGraph>& orders,
                                    const std::vector<BipartiteGraph>& bgs);

enum class IIUncondStatus { Valid, Invalid, Undecided };

struct IIUnconditionalOutcome {
    IIUncondStatus status = IIUncondStatus::Invalid;
    StrongestOrderPair orders;
    Partition context_partition;
    long long sat_vars = 0, sat_clauses = 0, sat_conflicts = 0;
    bool sat_ran = false;
};

IIUnconditionalOutcome validate_ii_unconditional(const Relation& rel,
                                                 const std::vector<int>& context, int a, int b,
                                                 const SolverBudget& budget = {},
                                                 unsigned long long seed = 0);

// `p cnf` header, one 0-terminated clause per line, `c` comments mapping each
// variable to its side and original value strings.
void write_dimacs(const SatInstance& inst, std::ostream& os,
                  const std::vector<std::string>& left_names,
                  const std::vector<std::string>& right_names);

}  // namespace domord
