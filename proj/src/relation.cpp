#include "domord/relation.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace domord {

Role role_from_string(const std::string& spec) {
    if (spec == "explicit:numeric") return Role::ExplicitNumeric;
    if (spec == "explicit:numeric-suffix") return Role::ExplicitNumericSuffix;
    if (spec == "explicit:date") return Role::ExplicitDate;
    if (spec == "explicit:lex") return Role::ExplicitLex;
    if (spec == "implicit") return Role::Implicit;
    if (spec == "ignored") return Role::Ignored;
    throw config_error("unknown attribute role '" + spec + "'");
}

std::string role_to_string(Role r) {
    switch (r) {
        case Role::ExplicitNumeric: return "explicit:numeric";
        case Role::ExplicitNumericSuffix: return "explicit:numeric-suffix";
        case Role::ExplicitDate: return "explicit:date";
        case Role::ExplicitLex: return "explicit:lex";
        case Role::Implicit: return "implicit";
        case Role::Ignored: return "ignored";
    }
    return "implicit";
}

ProfileConfig ProfileConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("invalid config JSON: ") + e.what());
    }
    ProfileConfig c;
    if (j.contains("attributes")) {
        for (auto it = j["attributes"].begin(); it != j["attributes"].end(); ++it) {
            c.attribute_roles[it.key()] = role_from_string(it.value().get<std::string>());
        }
    }
    if (j.contains("implicit_distinct_cap")) c.implicit_distinct_cap = j["implicit_distinct_cap"];
    if (j.contains("max_lattice_level")) c.max_lattice_level = j["max_lattice_level"];
    if (j.contains("strict_nulls")) c.strict_nulls = j["strict_nulls"];
    return c;
}

ProfileConfig ProfileConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

int Relation::attribute_index(std::string_view name) const {
    auto it = attr_index_.find(std::string(name));
    return it == attr_index_.end() ? -1 : it->second;
}

int Relation::require_attribute(std::string_view name) const {
    int idx = attribute_index(name);
    if (idx < 0) throw input_error("unknown attribute '" + std::string(name) + "'");
    return idx;
}

namespace {

bool parse_plain_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size();
}

bool parse_suffixed_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    double scale = 1.0;
    std::string body = s;
    char last = s.back();
    if (last == 'K' || last == 'k') {
        scale = 1e3;
        body = s.substr(0, s.size() - 1);
    } else if (last == 'M' || last == 'm') {
        scale = 1e6;
        body = s.substr(0, s.size() - 1);
    }
    double v;
    if (!parse_plain_number(body, v)) return false;
    out = v * scale;
    return true;
}

bool parse_date(const std::string& s, long& out) {
    if (s.size() != 8) return false;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    out = std::strtol(s.c_str(), nullptr, 10);
    return true;
}

}  // namespace

void RelationBuilder::set_header(std::vector<std::string> names) {
    header_ = std::move(names);
}

void RelationBuilder::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        throw input_error("row width " + std::to_string(cells.size()) +
                          " does not match header width " + std::to_string(header_.size()));
    rows_.push_back(cells);
}

Relation RelationBuilder::build(const ProfileConfig& config) const {
    for (const auto& [name, role] : config.attribute_roles) {
        (void)role;
        if (std::find(header_.begin(), header_.end(), name) == header_.end())
            throw config_error("config names attribute '" + name + "' absent from header");
    }

    Relation rel;
    rel.name_ = name_;
    rel.rows_ = static_cast<long>(rows_.size());
    const int ncols = static_cast<int>(header_.size());
    rel.columns_.resize(ncols);
    rel.dictionaries_.resize(ncols);
    rel.ranks_.resize(ncols);
    rel.null_rows_.resize(ncols);
    rel.attrs_.resize(ncols);

    for (int a = 0; a < ncols; ++a) {
        rel.attrs_[a].name = header_[a];
        rel.attr_index_[header_[a]] = a;
        auto& col = rel.columns_[a];
        col.reserve(rows_.size());
        std::unordered_map<std::string, int> intern;
        for (long r = 0; r < rel.rows_; ++r) {
            const std::string& cell = rows_[r][a];
            if (cell.empty()) {
                if (config.strict_nulls)
                    throw input_error("null cell in attribute '" + header_[a] + "' at data row " +
                                      std::to_string(r + 1) + " (strict_nulls)");
                col.push_back(-1);
                rel.null_rows_[a].push_back(r);
                continue;
            }
            auto [it, inserted] = intern.emplace(cell, static_cast<int>(rel.dictionaries_[a].size()));
            if (inserted) rel.dictionaries_[a].push_back(cell);
            col.push_back(it->second);
        }
        rel.attrs_[a].distinct_count = static_cast<int>(rel.dictionaries_[a].size());
    }

    for (int a = 0; a < ncols; ++a) {
        AttributeMeta& meta = rel.attrs_[a];
        auto cfg = config.attribute_roles.find(meta.name);
        if (cfg != config.attribute_roles.end()) {
            meta.role = cfg->second;
        } else {
            bool all_numeric = true;
            for (const std::string& v : rel.dictionaries_[a]) {
                double d = 0;
                if (!parse_plain_number(v, d)) {
                    all_numeric = false;
                    break;
                }
            }
            if (all_numeric)
                meta.role = Role::ExplicitNumeric;
            else if (meta.distinct_count <= config.implicit_distinct_cap)
                meta.role = Role::Implicit;
            else
                meta.role = Role::Ignored;
        }
        if (meta.role == Role::Implicit && meta.distinct_count > config.implicit_distinct_cap)
            meta.role = Role::Ignored;

        if (!is_explicit(meta.role)) continue;

        // Sort keys define the strong total order over distinct values.
        // Distinct strings mapping to equal keys are tie-broken bytewise so
        // the order stays connex and irreflexive.
        const auto& dict = rel.dictionaries_[a];
        const int m = static_cast<int>(dict.size());
        std::vector<double> numkey(m, 0.0);
        for (int v = 0; v < m; ++v) {
            bool ok = true;
            switch (meta.role) {
                case Role::ExplicitNumeric: ok = parse_plain_number(dict[v], numkey[v]); break;
                case Role::ExplicitNumericSuffix: ok = parse_suffixed_number(dict[v], numkey[v]); break;
                case Role::ExplicitDate: {
                    long d = 0;
                    ok = parse_date(dict[v], d);
                    numkey[v] = static_cast<double>(d);
                    break;
                }
                case Role::ExplicitLex: break;
                default: break;
            }
            if (!ok)
                throw input_error("value '" + dict[v] + "' of attribute '" + meta.name +
                                  "' does not parse under role " + role_to_string(meta.role));
        }
        std::vector<int> by_order(m);
        for (int v = 0; v < m; ++v) by_order[v] = v;
        if (meta.role == Role::ExplicitLex) {
            std::sort(by_order.begin(), by_order.end(),
                      [&](int x, int y) { return dict[x] < dict[y]; });
        } else {
            std::sort(by_order.begin(), by_order.end(), [&](int x, int y) {
                if (numkey[x] != numkey[y]) return numkey[x] < numkey[y];
                return dict[x] < dict[y];
            });
        }
        rel.ranks_[a].resize(m);
        for (int pos = 0; pos < m; ++pos) rel.ranks_[a][by_order[pos]] = pos;
    }
    return rel;
}

namespace {

// RFC 4180 reader: quoted fields, doubled-quote escapes, fields may embed
// separators and line breaks. Tracks the physical line for error messages.
class CsvReader {
public:
    explicit CsvReader(const std::string& text) : text_(text) {}

    bool next_record(std::vector<std::string>& out) {
        out.clear();
        if (pos_ >= text_.size()) return false;
        std::string field;
        bool in_quotes = false;
        bool quoted_field = false;
        bool any = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (in_quotes) {
                if (c == '"') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                        field += '"';
                        pos_ += 2;
                    } else {
                        in_quotes = false;
                        ++pos_;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field += c;
                    ++pos_;
                }
                any = true;
                continue;
            }
            if (c == '"') {
                if (!field.empty() || quoted_field)
                    throw parse_error("unexpected quote inside unquoted field", line_);
                in_quotes = true;
                quoted_field = true;
                ++pos_;
                any = true;
                continue;
            }
            if (c == ',') {
                out.push_back(std::move(field));
                field.clear();
                quoted_field = false;
                ++pos_;
                any = true;
                continue;
            }
            if (c == '\r' || c == '\n') {
                if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
                ++pos_;
                ++line_;
                out.push_back(std::move(field));
                return true;
            }
            if (quoted_field && !in_quotes)
                throw parse_error("data after closing quote", line_);
            field += c;
            ++pos_;
            any = true;
        }
        if (in_quotes) throw parse_error("unterminated quoted field", line_);
        if (any || !field.empty()) {
            out.push_back(std::move(field));
            return true;
        }
        return false;
    }

    long line() const { return line_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    long line_ = 1;
};

}  // namespace

Relation load_csv_text(const std::string& text, const std::string& name,
                       const ProfileConfig& config) {
    CsvReader reader(text);
    std::vector<std::string> record;
    if (!reader.next_record(record)) throw parse_error("missing header record", 1);
    RelationBuilder builder(name);
    builder.set_header(record);
    const std::size_t width = record.size();
    while (true) {
        long line = reader.line();
        if (!reader.next_record(record)) break;
        if (record.size() == 1 && record[0].empty()) continue;  // trailing blank line
        if (record.size() != width)
            throw parse_error("record has " + std::to_string(record.size()) +
                                  " fields, expected " + std::to_string(width),
                              line);
        builder.add_row(record);
    }
    return builder.build(config);
}

Relation load_csv(const std::string& path, const ProfileConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open CSV file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string base = path;
    auto slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    return load_csv_text(ss.str(), base, config);
}

std::vector<long> rows_without_nulls(const Relation& rel, const std::vector<int>& attrs) {
    std::vector<long> rows;
    rows.reserve(rel.row_count());
    for (long r = 0; r < rel.row_count(); ++r) {
        bool ok = true;
        for (int a : attrs) {
            if (rel.is_null(a, r)) {
                ok = false;
                break;
            }
        }
        if (ok) rows.push_back(r);
    }
    return rows;
}

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<int>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (int v : k) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace

Partition partition_rows(const Relation& rel, const std::vector<int>& attrs,
                         const std::vector<long>& rows) {
    for (int a : attrs)
        if (a < 0 || a >= rel.attribute_count()) throw input_error("attribute index out of range");
    Partition p;
    p.context = attrs;
    std::sort(p.context.begin(), p.context.end());
    if (p.context.empty()) {
        if (!rows.empty()) p.groups.push_back(rows);
        return p;
    }
    std::unordered_map<std::vector<int>, int, KeyHash> index;
    std::vector<int> key(p.context.size());
    for (long r : rows) {
        bool null_row = false;
        for (std::size_t i = 0; i < p.context.size(); ++i) {
            int v = rel.value_id(p.context[i], r);
            if (v < 0) {
                null_row = true;
                break;
            }
            key[i] = v;
        }
        if (null_row) continue;
        auto [it, inserted] = index.emplace(key, static_cast<int>(p.groups.size()));
        if (inserted) p.groups.emplace_back();
        p.groups[it->second].push_back(r);
    }
    return p;
}

Partition partition(const Relation& rel, const std::vector<int>& attrs) {
    std::vector<long> all(rel.row_count());
    for (long r = 0; r < rel.row_count(); ++r) all[r] = r;
    return partition_rows(rel, attrs, all);
}

SortedPartition sorted_partition_rows(const Relation& rel, const std::vector<int>& sort_attrs,
                                      const std::vector<long>& rows) {
    for (int a : sort_attrs) {
        if (a < 0 || a >= rel.attribute_count()) throw input_error("attribute index out of range");
        if (!is_explicit(rel.attribute(a).role))
            throw input_error("attribute '" + rel.attribute(a).name +
                              "' lacks an explicit order and cannot sort a partition");
    }
    SortedPartition sp;
    sp.base = partition_rows(rel, sort_attrs, rows);
    const std::size_t g = sp.base.groups.size();
    sp.order.resize(g);
    for (std::size_t i = 0; i < g; ++i) sp.order[i] = static_cast<int>(i);
    // Rank tuple of a group, in the caller's attribute list order.
    std::vector<std::vector<int>> keys(g);
    for (std::size_t i = 0; i < g; ++i) {
        long r = sp.base.groups[i].front();
        keys[i].reserve(sort_attrs.size());
        for (int a : sort_attrs) keys[i].push_back(rel.explicit_rank(a, rel.value_id(a, r)));
    }
    std::sort(sp.order.begin(), sp.order.end(),
              [&](int x, int y) { return keys[x] < keys[y]; });
    return sp;
}

SortedPartition sorted_partition(const Relation& rel, const std::vector<int>& sort_attrs) {
    std::vector<long> all(rel.row_count());
    for (long r = 0; r < rel.row_count(); ++r) all[r] = r;
    return sorted_partition_rows(rel, sort_attrs, all);
}

bool check_fd_rows(const Relation& rel, const std::vector<int>& lhs_attrs, int rhs,
                   const std::vector<long>& rows) {
    // Split-free iff refining the lhs partition by rhs adds no groups.
    std::unordered_map<std::vector<int>, int, KeyHash> seen;
    std::vector<int> key(lhs_attrs.size());
    for (long r : rows) {
        bool null_row = rel.is_null(rhs, r);
        for (std::size_t i = 0; i < lhs_attrs.size() && !null_row; ++i) {
            key[i] = rel.value_id(lhs_attrs[i], r);
            if (key[i] < 0) null_row = true;
        }
        if (null_row) continue;
        int v = rel.value_id(rhs, r);
        auto [it, inserted] = seen.emplace(key, v);
        if (!inserted && it->second != v) return false;
    }
    return true;
}

bool check_fd(const Relation& rel, const std::vector<int>& context, int lhs, int rhs) {
    std::vector<int> lhs_attrs = context;
    lhs_attrs.push_back(lhs);
    std::sort(lhs_attrs.begin(), lhs_attrs.end());
    lhs_attrs.erase(std::unique(lhs_attrs.begin(), lhs_attrs.end()), lhs_attrs.end());
    std::vector<long> all(rel.row_count());
    for (long r = 0; r < rel.row_count(); ++r) all[r] = r;
    return check_fd_rows(rel, lhs_attrs, rhs, all);
}

}  // namespace domord
