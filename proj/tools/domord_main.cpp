#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "domord/lattice.hpp"

namespace {

using domord::Candidate;
using domord::CandidateKind;
using domord::ProfileConfig;
using domord::Relation;

struct CommonArgs {
    std::string csv;
    std::string config_path;
    std::string out_path;
    int max_level = -1;
    int threads = 1;
    long long solver_budget = 1'000'000;
    unsigned long long seed = 0;
};

ProfileConfig load_config(const CommonArgs& args) {
    ProfileConfig cfg;
    if (!args.config_path.empty()) cfg = ProfileConfig::from_json_file(args.config_path);
    if (args.max_level > 0) cfg.max_lattice_level = args.max_level;
    return cfg;
}

domord::DiscoveryOptions make_options(const CommonArgs& args, const ProfileConfig& cfg) {
    domord::DiscoveryOptions opts;
    opts.max_level = cfg.max_lattice_level;
    opts.threads = args.threads;
    opts.budget.max_conflicts = args.solver_budget;
    opts.seed = args.seed;
    return opts;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domord::input_error("cannot open output file '" + path + "'");
    out << text;
}

// spec tokens: context=A,B left=C right=D scope=unconditional
Candidate parse_candidate_spec(const Relation& rel, const std::vector<std::string>& tokens) {
    std::vector<std::string> context_names;
    std::string left_name, right_name, scope;
    for (const std::string& tok : tokens) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw domord::input_error("malformed candidate token '" + tok + "'");
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        if (key == "context") {
            std::size_t pos = 0;
            while (pos <= val.size() && !val.empty()) {
                auto comma = val.find(',', pos);
                std::string name = val.substr(pos, comma == std::string::npos ? comma : comma - pos);
                if (!name.empty()) context_names.push_back(name);
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        } else if (key == "left") {
            left_name = val;
        } else if (key == "right") {
            right_name = val;
        } else if (key == "scope") {
            scope = val;
        } else {
            throw domord::input_error("unknown candidate key '" + key + "'");
        }
    }
    if (left_name.empty() || right_name.empty())
        throw domord::input_error("candidate spec needs left=<attr> right=<attr>");
    if (left_name == right_name)
        throw domord::input_error("candidate left and right must differ");

    Candidate cand;
    int left = rel.require_attribute(left_name);
    int right = rel.require_attribute(right_name);
    for (const auto& name : context_names) {
        int idx = rel.require_attribute(name);
        if (idx == left || idx == right)
            throw domord::input_error("context attribute '" + name + "' collides with the pair");
        cand.context.push_back(idx);
    }
    std::sort(cand.context.begin(), cand.context.end());
    cand.context.erase(std::unique(cand.context.begin(), cand.context.end()),
                       cand.context.end());

    bool el = domord::is_explicit(rel.attribute(left).role);
    bool er = domord::is_explicit(rel.attribute(right).role);
    if (rel.attribute(left).role == domord::Role::Ignored ||
        rel.attribute(right).role == domord::Role::Ignored)
        throw domord::input_error("candidate uses an ignored attribute");
    if (el && er) {
        cand.kind = CandidateKind::EE_OC;
        cand.left = std::min(left, right);
        cand.right = std::max(left, right);
    } else if (el || er) {
        cand.kind = CandidateKind::EI_OC;
        cand.left = el ? left : right;
        cand.right = el ? right : left;
    } else {
        cand.kind = CandidateKind::II_OC;
        cand.left = left;
        cand.right = right;
    }
    if (scope == "conditional")
        cand.scope_request = domord::ScopeRequest::Conditional;
    else if (scope == "unconditional")
        cand.scope_request = domord::ScopeRequest::Unconditional;
    else if (!scope.empty() && scope != "auto")
        throw domord::input_error("scope must be conditional, unconditional, or auto");
    return cand;
}

int cmd_discover(const CommonArgs& args, const std::string& stats_path) {
    ProfileConfig cfg = load_config(args);
    Relation rel = domord::load_csv(args.csv, cfg);
    auto opts = make_options(args, cfg);
    domord::RunReport report = domord::run_discovery(rel, opts);
    write_output(args.out_path, domord::findings_to_json(rel, report.findings).dump(2) + "\n");
    std::string stats = domord::stats_to_json(report).dump(2) + "\n";
    if (!stats_path.empty())
        write_output(stats_path, stats);
    else
        std::cerr << stats;
    return report.has_undecided ? 2 : 0;
}

int cmd_check(const CommonArgs& args, const std::vector<std::string>& spec) {
    ProfileConfig cfg = load_config(args);
    Relation rel = domord::load_csv(args.csv, cfg);
    Candidate cand = parse_candidate_spec(rel, spec);
    auto opts = make_options(args, cfg);
    domord::Finding f = domord::verify_candidate(
        rel, cand, static_cast<int>(cand.context.size()) + 2, opts);
    write_output(args.out_path, domord::finding_to_json(rel, f).dump(2) + "\n");
    return f.status == domord::Status::Undecided ? 2 : 0;
}

int cmd_reduce_sat(const CommonArgs& args, const std::vector<std::string>& spec) {
    ProfileConfig cfg = load_config(args);
    Relation rel = domord::load_csv(args.csv, cfg);
    Candidate cand = parse_candidate_spec(rel, spec);
    if (cand.kind != CandidateKind::II_OC)
        throw domord::input_error("reduce-sat needs a candidate with two implicit sides");
    if (cand.context.empty())
        throw domord::input_error("reduce-sat needs a non-empty context (unconditional case)");

    std::vector<int> involved = cand.context;
    involved.push_back(cand.left);
    involved.push_back(cand.right);
    auto rows = domord::rows_without_nulls(rel, involved);
    domord::Partition part = domord::partition_rows(rel, cand.context, rows);
    std::vector<domord::BipartiteGraph> bgs;
    for (const auto& group : part.groups) {
        if (group.size() < 2) continue;
        domord::BipartiteGraph bg = domord::build_bipartite(rel, group, cand.left, cand.right);
        if (!domord::check_bg_valid(domord::simplify_singletons(bg)))
            throw domord::input_error(
                "candidate is invalid (cyclic or 3-fan-out co-occurrence graph); nothing to export");
        bgs.push_back(std::move(bg));
    }
    domord::SatInstance inst = domord::reduce_to_sat(bgs);
    std::vector<std::string> left_names(rel.distinct_count(cand.left));
    for (int v = 0; v < rel.distinct_count(cand.left); ++v)
        left_names[v] = rel.value_string(cand.left, v);
    std::vector<std::string> right_names(rel.distinct_count(cand.right));
    for (int v = 0; v < rel.distinct_count(cand.right); ++v)
        right_names[v] = rel.value_string(cand.right, v);
    std::ostringstream os;
    domord::write_dimacs(inst, os, left_names, right_names);
    write_output(args.out_path, os.str());
    return 0;
}

int cmd_rank(const std::string& findings_path, long k, const std::string& out_path) {
    std::ifstream in(findings_path);
    if (!in) throw domord::input_error("cannot open findings file '" + findings_path + "'");
    nlohmann::ordered_json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw domord::input_error(std::string("findings file is not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) throw domord::input_error("findings file must hold a JSON array");

    std::vector<std::size_t> idx(arr.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto identity = [&](const nlohmann::ordered_json& f) {
        std::string key;
        for (const auto& c : f["context"]) key += c.get<std::string>() + ",";
        key += "|" + f["left"].get<std::string>() + "|" + f["right"].get<std::string>();
        return key;
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        double sx = std::stod(arr[x]["score"].get<std::string>());
        double sy = std::stod(arr[y]["score"].get<std::string>());
        if (sx != sy) return sx > sy;
        if (arr[x]["context"].size() != arr[y]["context"].size())
            return arr[x]["context"].size() < arr[y]["context"].size();
        return identity(arr[x]) < identity(arr[y]);
    });
    if (k >= 0 && static_cast<std::size_t>(k) < idx.size()) idx.resize(k);

    std::ostringstream os;
    for (std::size_t i : idx) {
        const auto& f = arr[i];
        std::string ctx;
        for (const auto& c : f["context"]) {
            if (!ctx.empty()) ctx += ",";
            ctx += c.get<std::string>();
        }
        os << f["score"].get<std::string>() << " " << f["kind"].get<std::string>() << " "
           << f["scope"].get<std::string>() << " {" << ctx << "} "
           << f["left"].get<std::string>() << " ~ " << f["right"].get<std::string>()
           << " orders=" << f["orders"].dump() << "\n";
    }
    write_output(out_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"implicit domain order discovery over tabular data"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> spec_tokens;
    std::string stats_path;
    std::string findings_path;
    long top_k = -1;

    auto add_common = [&](CLI::App* sub, bool needs_csv) {
        if (needs_csv) sub->add_option("csv", args.csv, "input CSV file")->required();
        sub->add_option("--config", args.config_path, "profile config JSON");
        sub->add_option("--out", args.out_path, "output path (default: stdout)");
        sub->add_option("--max-level", args.max_level, "lattice level cap");
        sub->add_option("--threads", args.threads, "within-level worker threads");
        sub->add_option("--solver-budget", args.solver_budget, "SAT conflict budget per candidate");
        sub->add_option("--seed", args.seed, "decision-order seed for the SAT solver");
    };

    CLI::App* discover = app.add_subcommand("discover", "run full lattice discovery");
    add_common(discover, true);
    discover->add_option("--stats", stats_path, "write run stats JSON here (default: stderr)");

    CLI::App* check = app.add_subcommand("check", "validate a single candidate");
    add_common(check, true);
    check->add_option("spec", spec_tokens, "context=A,B left=C right=D [scope=...]")->required();

    CLI::App* reduce = app.add_subcommand("reduce-sat", "export a candidate's CNF (DIMACS)");
    add_common(reduce, true);
    reduce->add_option("spec", spec_tokens, "context=A,B left=C right=D")->required();

    CLI::App* rank = app.add_subcommand("rank", "print top-k findings from a findings JSON file");
    rank->add_option("findings", findings_path, "findings JSON file")->required();
    rank->add_option("-k,--top", top_k, "how many findings to print (default: all)");
    rank->add_option("--out", args.out_path, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (discover->parsed()) return cmd_discover(args, stats_path);
        if (check->parsed()) return cmd_check(args, spec_tokens);
        if (reduce->parsed()) return cmd_reduce_sat(args, spec_tokens);
        if (rank->parsed()) return cmd_rank(findings_path, top_k, args.out_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
