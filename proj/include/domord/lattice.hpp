#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "domord/cpp_sat.hpp"
#include "domord/ei_discovery.hpp"
#include "domord/ii_discovery.hpp"
#include "domord/interestingness.hpp"
#include "domord/relation.hpp"

namespace domord {

enum class CandidateKind { EE_OC, EI_OC, EI_OD, II_OC, II_OD, OFD };
enum class Scope { Conditional, Unconditional };
enum class Status { Valid, Invalid, Undecided };

std::string kind_to_string(CandidateKind k);
std::string scope_to_string(Scope s);
std::string status_to_string(Status s);

enum class ScopeRequest { Auto, Conditional, Unconditional };

struct Candidate {
    std::vector<int> context;  // sorted attribute indices
    int left = -1;             // -1 for OFD candidates
    int right = -1;
    CandidateKind kind = CandidateKind::OFD;
    ScopeRequest scope_request = ScopeRequest::Auto;
};

struct Finding {
    Candidate candidate;
    CandidateKind kind = CandidateKind::OFD;  // possibly upgraded (+OFD => *_OD)
    Status status = Status::Invalid;
    Scope scope = Scope::Unconditional;
    int level = 0;
    Rational score;
    nlohmann::ordered_json orders = nlohmann::ordered_json::object();
    std::string polarity = "anchored";
    // run bookkeeping, not serialized
    bool sat_ran = false;
    long long sat_conflicts = 0;
};

// Dependencies recorded at earlier levels, used for pruning.
struct PriorFindings {
    // rhs attribute -> contexts of valid OFDs
    std::vector<std::vector<std::vector<int>>> ofd_contexts;
    // (min attr, max attr) -> contexts of valid unconditional OCs/ODs
    std::map<std::pair<int, int>, std::vector<std::vector<int>>> unconditional_pairs;

    void resize(int attr_count) { ofd_contexts.resize(attr_count); }
};

std::vector<Candidate> generate_level(int level, const Relation& rel,
                                      const PriorFindings& prior, std::size_t* pruned_out);
std::vector<Candidate> prune(std::vector<Candidate> candidates, const PriorFindings& prior);

struct DiscoveryOptions {
    int max_level = 3;
    int threads = 1;
    SolverBudget budget;
    unsigned long long seed = 0;
};

struct LevelStats {
    int level = 0;
    std::size_t candidates = 0;
    std::size_t pruned = 0;
    long long runtime_ms = 0;
    long long sat_instances = 0;
    long long sat_conflicts = 0;
};

struct RunReport {
    std::vector<Finding> findings;
    std::vector<LevelStats> levels;
    bool has_undecided = false;
};

Finding verify_candidate(const Relation& rel, const Candidate& cand, int level,
                         const DiscoveryOptions& opts);

RunReport run_discovery(const Relation& rel, const DiscoveryOptions& opts);

nlohmann::ordered_json finding_to_json(const Relation& rel, const Finding& f);
nlohmann::ordered_json findings_to_json(const Relation& rel, const std::vector<Finding>& fs);
nlohmann::ordered_json stats_to_json(const RunReport& report);

// Top-k by score descending; ties by smaller context, then lexicographic
// candidate identity.
std::vector<std::size_t> rank_order(const Relation& rel, const std::vector<Finding>& findings,
                                    std::size_t k);

}  // namespace domord
