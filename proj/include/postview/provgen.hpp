#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "postview/catalog.hpp"
#include "postview/engine.hpp"
#include "postview/sql_ast.hpp"
#include "postview/sql_printer.hpp"

namespace postview {

/// Key-retrieval query for one base view referenced by one query block.
struct ProvQuery {
    std::string label;
    sql::QueryAst query;
    std::string target_view;
};

struct ProvGeneration {
    std::vector<ProvQuery> queries;
    std::vector<std::string> warnings;  // one per skipped block
};

struct ProvTuple {
    std::string label;
    TupleId tuple;

    friend bool operator==(const ProvTuple&, const ProvTuple&) = default;
};

struct ReconciliationReport {
    bool equal = false;
    bool partial = false;
    TupleSet engine_only;  // contributing in the engine, missing from provenance queries
    TupleSet prov_only;
    std::vector<std::string> notes;

    std::string verdict() const {
        std::string v = equal ? "equal" : "mismatch";
        if (partial) v += " (partial: blocks skipped)";
        return v;
    }
};

namespace provgen_detail {

using sql::Expr;
using sql::ExprKind;
using sql::QueryAst;

// Replaces unqualified references to select aliases by the aliased expression.
inline Expr substitute_aliases(Expr e, const QueryAst& q) {
    if (e.kind == ExprKind::Column && e.column.qualifier.empty()) {
        for (const auto& s : q.select_items)
            if (!s.alias.empty() && text::iequals(s.alias, e.column.name)) return s.expr;
        return e;
    }
    for (auto& a : e.args) a = substitute_aliases(std::move(a), q);
    return e;
}

inline void collect_subqueries(const Expr& e, std::vector<const QueryAst*>& out) {
    if (e.kind == ExprKind::InSubquery || e.kind == ExprKind::Exists) {
        out.push_back(e.subquery.get());
        return;
    }
    for (const auto& a : e.args) collect_subqueries(a, out);
}

// Key columns of one FROM item, possibly threaded up through derived tables.
struct KeyedItem {
    std::string view;
    sql::TableRef ref;              // FROM item, augmented when derived
    std::vector<sql::Expr> keys;    // key expressions in the enclosing block
    std::vector<std::string> names; // key column names of the base view
};

class Generator {
public:
    explicit Generator(const Catalog& catalog) : catalog_(catalog) {}

    ProvGeneration run(const QueryAst& q) {
        block(q);
        return std::move(out_);
    }

private:
    void warn(std::string msg) { out_.warnings.push_back(std::move(msg)); }

    std::string next_label() { return "q" + std::to_string(counter_++); }

    static std::string keyed_name(const std::string& key) { return "pv_" + key; }

    // Appends the base view's keys to the select list of a derived table so
    // that the enclosing block can return them. Only row-preserving chains
    // (single FROM item, no aggregation, no DISTINCT) qualify.
    std::optional<KeyedItem> keyed(const sql::TableRef& ref, bool qualify) {
        if (!ref.is_subquery()) {
            const View* view = catalog_.find(ref.view);
            if (!view) return std::nullopt;
            KeyedItem k{view->name, ref, {}, view->table.schema.key};
            for (const auto& key : view->table.schema.key)
                k.keys.push_back(sql::col(key, qualify ? ref.scope_name() : std::string()));
            return k;
        }
        const QueryAst& sub = *ref.subquery;
        if (sub.from.size() != 1 || sub.distinct || sql::is_aggregate_block(sub)) return std::nullopt;
        auto inner = keyed(sub.from.front(), false);
        if (!inner) return std::nullopt;
        QueryAst augmented = sub;
        augmented.from.front() = inner->ref;
        KeyedItem k{inner->view, ref, {}, inner->names};
        for (std::size_t i = 0; i < inner->keys.size(); ++i) {
            const std::string alias = keyed_name(inner->names[i]);
            augmented.select_items.push_back({inner->keys[i], alias});
            k.keys.push_back(sql::col(alias, qualify ? ref.alias : std::string()));
        }
        k.ref.subquery = sql::Box<QueryAst>(std::move(augmented));
        return k;
    }

    // `lhs IN (s)`, widened so a row whose lhs holds NULLs still matches a
    // surviving group with NULLs in the same positions.
    static Expr null_safe_in(std::vector<Expr> lhs, QueryAst s) {
        const std::size_t k = lhs.size();
        for (std::size_t i = 0; i < k; ++i) s.select_items[i].alias = "pv_g" + std::to_string(i);
        std::vector<Expr> branches{sql::in_subquery(lhs, s)};
        for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
            QueryAst probe;
            sql::TableRef groups;
            groups.subquery = sql::Box<QueryAst>(s);
            groups.alias = "pv_groups";
            probe.from.push_back(std::move(groups));
            std::vector<Expr> probe_where, row_conds, rest;
            for (std::size_t i = 0; i < k; ++i) {
                Expr g = sql::col("pv_g" + std::to_string(i), "pv_groups");
                if (mask & (1u << i)) {
                    probe_where.push_back(sql::is_null(g));
                    row_conds.push_back(sql::is_null(lhs[i]));
                } else {
                    probe.select_items.push_back({g, ""});
                    rest.push_back(lhs[i]);
                }
            }
            probe.where = sql::conjoin(std::move(probe_where));
            if (rest.empty()) {
                probe.select_items.push_back({sql::col("pv_g0", "pv_groups"), ""});
                row_conds.push_back(sql::exists(std::move(probe)));
            } else {
                row_conds.push_back(sql::in_subquery(std::move(rest), std::move(probe)));
            }
            branches.push_back(*sql::conjoin(std::move(row_conds)));
        }
        return branches.size() == 1 ? std::move(branches.front()) : sql::logical(ExprKind::Or, std::move(branches));
    }

    // Extra WHERE constraint selecting rows whose group (or distinct row)
    // survives HAVING / ORDER BY / LIMIT.
    std::optional<Expr> survivor_constraint(const QueryAst& q) {
        const bool aggregate = sql::is_aggregate_block(q);
        if (aggregate && !q.group_by.empty()) {
            if (!q.having && !q.limit) return std::nullopt;
            QueryAst s;
            for (const auto& g : q.group_by) s.select_items.push_back({g, ""});
            s.from = q.from;
            s.where = q.where;
            s.group_by = q.group_by;
            if (q.having) s.having = substitute_aliases(*q.having, q);
            for (const auto& o : q.order_by) s.order_by.push_back({substitute_aliases(o.expr, q), o.descending});
            s.limit = q.limit;
            return null_safe_in(q.group_by, std::move(s));
        }
        if (aggregate) {
            if (!q.having && !(q.limit && *q.limit == 0)) return std::nullopt;
            QueryAst s;
            s.select_items.push_back({sql::agg(sql::AggFn::CountStar), ""});
            s.from = q.from;
            s.where = q.where;
            if (q.having) s.having = substitute_aliases(*q.having, q);
            s.limit = q.limit;
            return sql::exists(std::move(s));
        }
        if (q.distinct && q.limit) {
            QueryAst s;
            s.distinct = true;
            std::vector<Expr> lhs;
            for (const auto& item : q.select_items) {
                s.select_items.push_back({item.expr, ""});
                lhs.push_back(item.expr);
            }
            s.from = q.from;
            s.where = q.where;
            for (const auto& o : q.order_by) s.order_by.push_back({substitute_aliases(o.expr, q), o.descending});
            s.limit = q.limit;
            return null_safe_in(std::move(lhs), std::move(s));
        }
        return std::nullopt;
    }

    void block(const QueryAst& q) {
        if (sql::block_has_negated_subquery(q)) {
            warn("skipped block with a negated subquery: " + sql::print(q));
            return;
        }
        if (engine_detail::references_outside(q, catalog_, nullptr, 0)) {
            warn("skipped correlated block: " + sql::print(q));
            return;
        }
        emit(q);

        std::vector<const QueryAst*> children;
        for (const auto& ref : q.from)
            if (ref.is_subquery()) children.push_back(ref.subquery.get());
        for (const auto& item : q.select_items) collect_subqueries(item.expr, children);
        if (q.where) collect_subqueries(*q.where, children);
        if (q.having) collect_subqueries(*q.having, children);
        for (const QueryAst* c : children) block(*c);
    }

    void emit(const QueryAst& q) {
        // Derived tables that aggregate or deduplicate have no row-level keys
        // here; their own block's query covers their contributing tuples.
        std::vector<std::pair<std::size_t, KeyedItem>> items;
        for (std::size_t f = 0; f < q.from.size(); ++f)
            if (auto k = keyed(q.from[f], q.from.size() > 1)) items.emplace_back(f, std::move(*k));
        const auto survivors = survivor_constraint(q);
        const bool plain_limit = !sql::is_aggregate_block(q) && !q.distinct && q.limit;

        for (auto& [slot, item] : items) {
            QueryAst p;
            for (std::size_t k = 0; k < item.keys.size(); ++k) {
                const Expr& key = item.keys[k];
                const std::string& name = item.names[k];
                p.select_items.push_back({key, text::iequals(key.column.name, name) ? "" : name});
            }
            p.from = q.from;
            p.from[slot] = item.ref;
            std::vector<Expr> where;
            if (q.where) where = sql::conjuncts(*q.where);
            if (survivors) where.push_back(*survivors);
            p.where = sql::conjoin(std::move(where));
            if (plain_limit) {
                for (const auto& o : q.order_by) p.order_by.push_back({substitute_aliases(o.expr, q), o.descending});
                p.limit = q.limit;
            }
            out_.queries.push_back({next_label(), std::move(p), item.view});
        }
    }

    const Catalog& catalog_;
    ProvGeneration out_;
    int counter_ = 0;
};

inline int label_index(const std::string& label) {
    try {
        return std::stoi(label.substr(1));
    } catch (...) {
        return 0;
    }
}

}  // namespace provgen_detail

/// Emits one key-retrieval query per base view per SELECT block, outer to
/// inner, left to right. Negated and correlated blocks are skipped with a
/// warning.
inline ProvGeneration generate(const sql::QueryAst& ast, const Catalog& catalog) {
    return provgen_detail::Generator(catalog).run(ast);
}

/// Runs the provenance queries; pairs come back ordered by label, then key.
inline std::vector<ProvTuple> execute_prov(const Catalog& catalog, const std::vector<ProvQuery>& queries,
                                           const EvalOptions& options = {}) {
    std::vector<ProvTuple> out;
    for (const auto& pq : queries) {
        const View& view = catalog.get(pq.target_view);
        AnnotatedTable t = eval(pq.query, catalog, options);
        std::set<TupleId> seen;
        for (const auto& row : t.rows) seen.insert(TupleId{view.name, row.values});
        for (const auto& id : seen) out.push_back({pq.label, id});
    }
    std::stable_sort(out.begin(), out.end(), [](const ProvTuple& a, const ProvTuple& b) {
        return provgen_detail::label_index(a.label) < provgen_detail::label_index(b.label);
    });
    return out;
}

/// Compares the engine's contributing tuples with what the provenance
/// queries retrieved.
inline ReconciliationReport reconcile(const AnnotatedTable& annotated, const ProvGeneration& generation,
                                      const std::vector<ProvTuple>& results) {
    ReconciliationReport r;
    const TupleSet engine = annotated.all_contributing();
    TupleSet prov;
    for (const auto& t : results) prov.insert(t.tuple);
    std::set_difference(engine.begin(), engine.end(), prov.begin(), prov.end(),
                        std::inserter(r.engine_only, r.engine_only.end()));
    std::set_difference(prov.begin(), prov.end(), engine.begin(), engine.end(),
                        std::inserter(r.prov_only, r.prov_only.end()));
    r.equal = r.engine_only.empty() && r.prov_only.empty();
    r.partial = !generation.warnings.empty();
    r.notes = generation.warnings;
    return r;
}

}  // namespace postview
