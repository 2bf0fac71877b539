#pragma once

#include <json.hpp>

#include "postview/pipeline.hpp"

namespace postview {

using nlohmann::json;

inline json to_json(const Value& v) {
    switch (v.type()) {
        case ValueType::Null: return nullptr;
        case ValueType::Bool: return v.as_bool();
        case ValueType::Int: return v.as_int();
        case ValueType::Float: return v.as_float();
        case ValueType::Text: return v.as_text();
        case ValueType::Date: return v.as_date().to_string();
    }
    return nullptr;
}

inline json to_json(const TupleId& id) {
    json key = json::array();
    for (const auto& k : id.key) key.push_back(to_json(k));
    return {{"view", id.view}, {"key", key.size() == 1 ? key[0] : key}};
}

inline json to_json(const TupleSet& s) {
    json out = json::array();
    for (const auto& t : s) out.push_back(to_json(t));
    return out;
}

/// List of monomials, each a list of tuple ids, repeated by multiplicity.
inline json to_json(const Polynomial& p) {
    json out = json::array();
    for (const auto& m : p.monomials()) {
        json mono = json::array();
        for (const auto& t : m) mono.push_back(to_json(t));
        out.push_back(mono);
    }
    return out;
}

inline json to_json(const AnnotatedTable& t) {
    json columns = json::array();
    for (const auto& c : t.columns) columns.push_back({{"name", c.name}, {"type", type_name(c.type)}});
    json rows = json::array();
    for (const auto& r : t.rows) {
        json values = json::array();
        for (const auto& v : r.values) values.push_back(to_json(v));
        json where = json::array();
        for (const auto& cell : r.where) {
            json sources = json::array();
            for (const auto& s : cell) sources.push_back({{"tuple", to_json(s.tuple)}, {"column", s.column}});
            where.push_back(sources);
        }
        rows.push_back({{"values", values},
                        {"polynomial", to_json(r.polynomial)},
                        {"where", where},
                        {"contributing", to_json(r.contributing)}});
    }
    return {{"columns", columns},
            {"rows", rows},
            {"nested_contributing", to_json(t.nested_contributing)},
            {"warnings", t.warnings}};
}

inline json to_json(const ReconciliationReport& r) {
    return {{"equal", r.equal},
            {"partial", r.partial},
            {"verdict", r.verdict()},
            {"engine_only", to_json(r.engine_only)},
            {"prov_only", to_json(r.prov_only)},
            {"notes", r.notes}};
}

inline json to_json(const ProvenanceBundle& b) {
    json queries = json::array();
    for (const auto& q : b.queries) queries.push_back({{"label", q.label}, {"sql", sql::print(q.query)}, {"view", q.target_view}});
    json tuples = json::array();
    for (const auto& t : b.tuples) {
        json id = to_json(t.tuple);
        tuples.push_back({{"label", t.label}, {"view", id["view"]}, {"key", id["key"]}});
    }
    return {{"queries", queries}, {"tuples", tuples}, {"reconciliation", to_json(b.reconciliation)}, {"partial", b.partial}};
}

inline json to_json(const RouteDecision& r) {
    if (r.is_vbe()) return {{"kind", "vbe"}, {"view", r.view}, {"confidence", r.confidence}};
    return {{"kind", "rbe"}, {"reason", r.reason}};
}

inline json to_json(const Answer& a) {
    json j = {{"question", a.question}, {"text", a.text}, {"route", to_json(a.route)}};
    j["category"] = a.category ? json(to_string(a.category->kind)) : json(nullptr);
    j["translator"] = a.translator ? json(to_string(*a.translator)) : json(nullptr);
    j["result_table"] = a.result_table ? to_json(*a.result_table) : json(nullptr);
    j["sql"] = a.sql ? json{{"raw", a.sql->raw}, {"cleaned", a.sql->cleaned}, {"relaxed", a.sql->relaxed}} : json(nullptr);
    j["provenance"] = a.provenance ? to_json(*a.provenance) : json(nullptr);
    if (a.sources) {
        json s = json::array();
        for (const auto& h : *a.sources) s.push_back({{"doc_id", h.doc_id}, {"score", h.score}});
        j["sources"] = s;
    } else {
        j["sources"] = nullptr;
    }
    j["context_budget_exceeded"] = a.context_budget_exceeded;
    json audit = json::array();
    for (const auto& e : a.audit) audit.push_back({{"stage", e.stage}, {"message", e.message}});
    j["audit"] = audit;
    return j;
}

}  // namespace postview
