#pragma once

#include <string>
#include <vector>

#include "domord/lattice.hpp"
#include "domord/relation.hpp"

namespace testutil {

inline std::string data_path(const std::string& file) {
    return std::string(TEST_DATA_DIR) + "/" + file;
}

inline domord::Relation load_festival() {
    auto cfg = domord::ProfileConfig::from_json_file(data_path("festival_config.json"));
    return domord::load_csv(data_path("festival.csv"), cfg);
}

inline domord::Relation load_table4() {
    auto cfg = domord::ProfileConfig::from_json_file(data_path("table4_config.json"));
    return domord::load_csv(data_path("table4.csv"), cfg);
}

inline domord::Relation load_table5() {
    auto cfg = domord::ProfileConfig::from_json_file(data_path("table5_config.json"));
    return domord::load_csv(data_path("table5.csv"), cfg);
}

// Rows of a relation built from (A,B) string pairs plus an optional group
// column; convenient for small synthetic cases.
inline domord::Relation make_relation(const std::vector<std::vector<std::string>>& rows,
                                      const std::vector<std::string>& header,
                                      const std::string& config_json = "{}") {
    domord::RelationBuilder b("test");
    b.set_header(header);
    for (const auto& r : rows) b.add_row(r);
    return b.build(domord::ProfileConfig::from_json_text(config_json));
}

// Value ids for a list of strings of one attribute.
inline std::vector<int> vids(const domord::Relation& rel, const std::string& attr,
                             const std::vector<std::string>& values) {
    int a = rel.require_attribute(attr);
    std::vector<int> out;
    for (const auto& v : values) {
        int id = -1;
        for (int i = 0; i < rel.distinct_count(a); ++i)
            if (rel.value_string(a, i) == v) id = i;
        out.push_back(id);
    }
    return out;
}

// Names of a block list, for readable assertions.
inline std::vector<std::vector<std::string>> block_names(const domord::Relation& rel,
                                                         const std::string& attr,
                                                         const domord::WeakOrder& w) {
    int a = rel.require_attribute(attr);
    std::vector<std::vector<std::string>> out;
    for (const auto& block : w.blocks) {
        std::vector<std::string> names;
        for (int v : block) names.push_back(rel.value_string(a, v));
        std::sort(names.begin(), names.end());
        out.push_back(names);
    }
    return out;
}

inline std::vector<long> all_rows(const domord::Relation& rel) {
    std::vector<long> rows(rel.row_count());
    for (long r = 0; r < rel.row_count(); ++r) rows[r] = r;
    return rows;
}

}  // namespace testutil
