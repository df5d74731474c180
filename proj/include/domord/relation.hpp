#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "domord/util.hpp"

namespace domord {

enum class Role {
    ExplicitNumeric,        // plain decimal / scientific numbers
    ExplicitNumericSuffix,  // numbers with K/M magnitude suffixes
    ExplicitDate,           // YYYYMMDD integers
    ExplicitLex,            // byte-wise string order
    Implicit,               // implicit-order candidate
    Ignored,
};

inline bool is_explicit(Role r) {
    return r == Role::ExplicitNumeric || r == Role::ExplicitNumericSuffix ||
           r == Role::ExplicitDate || r == Role::ExplicitLex;
}

Role role_from_string(const std::string& spec);
std::string role_to_string(Role r);

struct AttributeMeta {
    std::string name;
    Role role = Role::Implicit;
    int distinct_count = 0;
};

struct ProfileConfig {
    std::map<std::string, Role> attribute_roles;
    int implicit_distinct_cap = 1000;
    int max_lattice_level = 3;
    bool strict_nulls = false;

    static ProfileConfig from_json_text(const std::string& text);
    static ProfileConfig from_json_file(const std::string& path);
};

// Immutable typed table. Cells hold dense per-attribute value ids; -1 marks a
// null (empty) cell. Explicit attributes carry a rank per value id giving the
// strong total order of their domain.
class Relation {
public:
    const std::string& name() const { return name_; }
    int attribute_count() const { return static_cast<int>(attrs_.size()); }
    long row_count() const { return rows_; }

    const AttributeMeta& attribute(int a) const { return attrs_[a]; }
    const std::vector<AttributeMeta>& attributes() const { return attrs_; }

    int attribute_index(std::string_view name) const;
    int require_attribute(std::string_view name) const;  // throws input_error

    int value_id(int a, long row) const { return columns_[a][row]; }
    bool is_null(int a, long row) const { return columns_[a][row] < 0; }
    const std::string& value_string(int a, int vid) const { return dictionaries_[a][vid]; }
    int distinct_count(int a) const { return static_cast<int>(dictionaries_[a].size()); }

    // Position of a value in its attribute's explicit order (0-based).
    int explicit_rank(int a, int vid) const { return ranks_[a][vid]; }

    const std::vector<long>& null_rows(int a) const { return null_rows_[a]; }
    bool has_nulls(int a) const { return !null_rows_[a].empty(); }

private:
    friend class RelationBuilder;
    std::string name_;
    std::vector<AttributeMeta> attrs_;
    long rows_ = 0;
    std::vector<std::vector<int>> columns_;            // [attr][row] -> vid or -1
    std::vector<std::vector<std::string>> dictionaries_;  // [attr][vid] -> original text
    std::vector<std::vector<int>> ranks_;              // [attr][vid] -> rank (explicit only)
    std::vector<std::vector<long>> null_rows_;
    std::unordered_map<std::string, int> attr_index_;
};

// Assembles a Relation from rows of raw strings; used by load_csv and tests.
class RelationBuilder {
public:
    explicit RelationBuilder(std::string name) : name_(std::move(name)) {}

    void set_header(std::vector<std::string> names);
    void add_row(const std::vector<std::string>& cells);  // "" means null
    Relation build(const ProfileConfig& config) const;

private:
    std::string name_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

Relation load_csv(const std::string& path, const ProfileConfig& config);
Relation load_csv_text(const std::string& text, const std::string& name,
                       const ProfileConfig& config);

// Equivalence classes of row indices over an attribute set. Rows that are
// null in any context attribute are excluded. Groups are ordered by first
// occurrence; rows within a group ascend.
struct Partition {
    std::vector<int> context;
    std::vector<std::vector<long>> groups;
    std::size_t group_count() const { return groups.size(); }
};

Partition partition(const Relation& rel, const std::vector<int>& attrs);
Partition partition_rows(const Relation& rel, const std::vector<int>& attrs,
                         const std::vector<long>& rows);

// Partition plus a permutation ordering the groups by the explicit
// comparators of the sort attributes (SQL order-by semantics).
struct SortedPartition {
    Partition base;
    std::vector<int> order;
};

SortedPartition sorted_partition(const Relation& rel, const std::vector<int>& sort_attrs);
SortedPartition sorted_partition_rows(const Relation& rel, const std::vector<int>& sort_attrs,
                                      const std::vector<long>& rows);

// True iff the OFD context+{lhs}: [] -> rhs holds, i.e. no split exists.
bool check_fd(const Relation& rel, const std::vector<int>& context, int lhs, int rhs);
bool check_fd_rows(const Relation& rel, const std::vector<int>& lhs_attrs, int rhs,
                   const std::vector<long>& rows);

// Rows non-null in every listed attribute, ascending.
std::vector<long> rows_without_nulls(const Relation& rel, const std::vector<int>& attrs);

}  // namespace domord
