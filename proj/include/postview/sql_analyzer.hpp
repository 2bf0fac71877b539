#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "postview/catalog.hpp"
#include "postview/sql_ast.hpp"
#include "postview/sql_printer.hpp"
#include "postview/text.hpp"

namespace postview::sql {

struct ScopeColumn {
    std::string qualifier;
    std::string name;
    ValueType type = ValueType::Null;
};

/// Columns visible in one SELECT block, chained to the enclosing block for
/// correlated references.
struct Scope {
    std::vector<ScopeColumn> columns;
    const Scope* outer = nullptr;
    bool complete = true;  // false when a FROM item failed to resolve
};

struct Resolution {
    const ScopeColumn* column = nullptr;
    int depth = 0;  // 0 = current block
    bool ambiguous = false;
};

inline Resolution resolve_column(const Scope& scope, const ColumnRef& ref) {
    int depth = 0;
    for (const Scope* s = &scope; s; s = s->outer, ++depth) {
        const ScopeColumn* found = nullptr;
        int matches = 0;
        for (const auto& c : s->columns) {
            if (!text::iequals(c.name, ref.name)) continue;
            if (!ref.qualifier.empty() && !text::iequals(c.qualifier, ref.qualifier)) continue;
            if (!found) found = &c;
            ++matches;
        }
        if (matches > 1) return {found, depth, true};
        if (found) return {found, depth, false};
    }
    return {};
}

struct Candidate {
    std::string name;
    std::size_t distance = 0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Diagnostic {
    enum class Kind { UnknownColumn, UnknownView, AmbiguousColumn, AggregateMisuse, TypeMismatch };
    Kind kind;
    std::string name;  // offending identifier, when there is one
    std::string message;
    std::vector<Candidate> candidates;
};

inline const char* to_string(Diagnostic::Kind k) {
    switch (k) {
        case Diagnostic::Kind::UnknownColumn: return "UnknownColumn";
        case Diagnostic::Kind::UnknownView: return "UnknownView";
        case Diagnostic::Kind::AmbiguousColumn: return "AmbiguousColumn";
        case Diagnostic::Kind::AggregateMisuse: return "AggregateMisuse";
        case Diagnostic::Kind::TypeMismatch: return "TypeMismatch";
    }
    return "?";
}

/// Name a select item contributes to its block's output.
inline std::string output_name(const SelectItem& item) {
    if (!item.alias.empty()) return item.alias;
    if (item.expr.kind == ExprKind::Column) return item.expr.column.name;
    return print(item.expr);
}

/// Walks a query block by block, resolving names and inferring types.
/// In validate mode it only reports; in clean mode it also renames unknown
/// columns to close candidates and drops WHERE/HAVING conjuncts whose
/// columns cannot be repaired.
class Analyzer {
public:
    enum class Mode { Validate, Clean, Silent };

    static constexpr std::size_t kCandidateDistance = 3;

    Analyzer(const Catalog& catalog, Mode mode, std::size_t max_repair_distance = 2)
        : catalog_(catalog), mode_(mode), max_repair_(max_repair_distance) {}

    /// Returns the block's output columns.
    std::vector<ScopeColumn> analyze(QueryAst& q, const Scope* outer = nullptr) {
        Scope scope = build_scope(q, outer);
        if (q.where) {
            process_predicate_clause(q.where, scope, /*aggregates_allowed=*/false, "WHERE");
        }
        for (auto& g : q.group_by) {
            type_of(g, scope, Ctx{false, false, "GROUP BY"});
        }
        const bool aggregate = is_aggregate_block(q);
        std::vector<ScopeColumn> outputs;
        for (auto& item : q.select_items) {
            if (item.expr.kind == ExprKind::Star) {
                if (aggregate) report(Diagnostic::Kind::AggregateMisuse, "*", "SELECT * in an aggregate query");
                for (const auto& c : scope.columns) outputs.push_back({"", c.name, c.type});
                continue;
            }
            auto t = type_of(item.expr, scope, Ctx{true, false, "SELECT"});
            outputs.push_back({"", output_name(item), t.value_or(ValueType::Null)});
        }
        if (q.having) process_predicate_clause(q.having, scope, true, "HAVING");

        // ORDER BY may name select aliases.
        for (auto& o : q.order_by) {
            if (o.expr.kind == ExprKind::Column && o.expr.column.qualifier.empty() && alias_of(q, o.expr.column.name))
                continue;
            type_of(o.expr, scope, Ctx{true, false, "ORDER BY"});
        }

        if (aggregate) check_grouping(q, scope);
        return outputs;
    }

    std::vector<Diagnostic>& diagnostics() { return diags_; }
    std::vector<std::string>& audit() { return audit_; }
    /// Unknown columns in clean mode that could not be repaired outside a
    /// droppable conjunct.
    const std::vector<std::string>& unrepairable() const { return unrepairable_; }

private:
    struct Ctx {
        bool aggregates_allowed = false;
        bool inside_aggregate = false;
        const char* clause = "";
    };

    void report(Diagnostic::Kind kind, std::string name, std::string message, std::vector<Candidate> cands = {}) {
        if (mode_ == Mode::Silent) return;
        diags_.push_back({kind, std::move(name), std::move(message), std::move(cands)});
    }

    static const SelectItem* alias_of(const QueryAst& q, const std::string& name) {
        for (const auto& s : q.select_items)
            if (!s.alias.empty() && text::iequals(s.alias, name)) return &s;
        return nullptr;
    }

    Scope build_scope(QueryAst& q, const Scope* outer) {
        Scope scope;
        scope.outer = outer;
        for (auto& ref : q.from) {
            if (ref.is_subquery()) {
                Analyzer inner(catalog_, mode_, max_repair_);
                auto cols = inner.analyze(*ref.subquery, nullptr);
                absorb(inner);
                for (auto& c : cols) scope.columns.push_back({ref.alias, c.name, c.type});
                continue;
            }
            const View* view = catalog_.find(ref.view);
            if (!view) {
                report(Diagnostic::Kind::UnknownView, ref.view, "unknown view '" + ref.view + "'");
                if (mode_ == Mode::Clean) unrepairable_.push_back("unknown view '" + ref.view + "'");
                scope.complete = false;
                continue;
            }
            for (const auto& c : view->table.schema.columns) scope.columns.push_back({ref.scope_name(), c.name, c.type});
        }
        return scope;
    }

    void absorb(Analyzer& inner) {
        for (auto& d : inner.diags_) diags_.push_back(std::move(d));
        for (auto& a : inner.audit_) audit_.push_back(std::move(a));
        for (auto& u : inner.unrepairable_) unrepairable_.push_back(std::move(u));
    }

    std::vector<Candidate> candidates_for(const Scope& scope, const ColumnRef& ref) const {
        std::vector<Candidate> out;
        for (const Scope* s = &scope; s; s = s->outer)
            for (const auto& c : s->columns) {
                if (!ref.qualifier.empty() && !text::iequals(c.qualifier, ref.qualifier)) continue;
                const std::size_t d = text::ilevenshtein(c.name, ref.name);
                if (d > kCandidateDistance) continue;
                bool dup = false;
                for (const auto& e : out) dup = dup || text::iequals(e.name, c.name);
                if (!dup) out.push_back({c.name, d});
            }
        std::stable_sort(out.begin(), out.end(),
                         [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
        return out;
    }

    // In clean mode, WHERE and HAVING are handled conjunct by conjunct so an
    // unrepairable column can drop just the conjunct that uses it.
    void process_predicate_clause(std::optional<Expr>& clause, const Scope& scope, bool aggregates_allowed,
                                  const char* name) {
        if (mode_ != Mode::Clean) {
            check_bool(*clause, scope, Ctx{aggregates_allowed, false, name});
            return;
        }
        std::vector<Expr> kept;
        in_droppable_clause_ = true;
        for (auto& part : conjuncts(*clause)) {
            const std::size_t before = unresolved_in_clause_;
            check_bool(part, scope, Ctx{aggregates_allowed, false, name});
            if (unresolved_in_clause_ != before) {
                audit_.push_back(std::string("dropped ") + name + " conjunct '" + print(part) +
                                 "': column has no repair candidate");
                // diagnostics from the dropped conjunct no longer apply
                diags_.resize(std::min(diags_.size(), diag_mark_));
                continue;
            }
            kept.push_back(std::move(part));
        }
        in_droppable_clause_ = false;
        clause = conjoin(std::move(kept));
    }

    void check_bool(Expr& e, const Scope& scope, Ctx ctx) {
        diag_mark_ = diags_.size();
        auto t = type_of(e, scope, ctx);
        if (t && *t != ValueType::Bool && *t != ValueType::Null)
            report(Diagnostic::Kind::TypeMismatch, "", std::string(ctx.clause) + " expects a boolean, got " +
                                                           type_name(*t) + " in '" + print(e) + "'");
    }

    std::optional<ValueType> type_of(Expr& e, const Scope& scope, Ctx ctx) {
        switch (e.kind) {
            case ExprKind::Literal: return e.literal.type();
            case ExprKind::Star:
                report(Diagnostic::Kind::TypeMismatch, "*", "'*' is only allowed as a select item");
                return std::nullopt;
            case ExprKind::Column: return column_type(e.column, scope, ctx);
            case ExprKind::Agg: {
                if (!ctx.aggregates_allowed)
                    report(Diagnostic::Kind::AggregateMisuse, to_string(e.agg),
                           std::string("aggregate ") + to_string(e.agg) + " not allowed in " + ctx.clause);
                if (ctx.inside_aggregate)
                    report(Diagnostic::Kind::AggregateMisuse, to_string(e.agg), "nested aggregate calls");
                if (e.agg == AggFn::CountStar) return ValueType::Int;
                Ctx inner{true, true, ctx.clause};
                auto t = type_of(e.args[0], scope, inner);
                switch (e.agg) {
                    case AggFn::Count: return ValueType::Int;
                    case AggFn::Sum:
                    case AggFn::Avg:
                        if (t && !is_numeric(*t) && *t != ValueType::Null)
                            report(Diagnostic::Kind::TypeMismatch, "",
                                   std::string(to_string(e.agg)) + " over non-numeric " + type_name(*t));
                        if (e.agg == AggFn::Avg) return ValueType::Float;
                        return t;
                    default: return t;
                }
            }
            case ExprKind::Compare: {
                auto l = type_of(e.args[0], scope, ctx);
                auto r = type_of(e.args[1], scope, ctx);
                if (l && r && !comparable(*l, *r, e.args[0], e.args[1]))
                    report(Diagnostic::Kind::TypeMismatch, "",
                           std::string("cannot compare ") + type_name(*l) + " with " + type_name(*r) + " in '" +
                               print(e) + "'");
                return ValueType::Bool;
            }
            case ExprKind::Like: {
                auto t = type_of(e.args[0], scope, ctx);
                if (t && *t != ValueType::Text && *t != ValueType::Date && *t != ValueType::Null)
                    report(Diagnostic::Kind::TypeMismatch, "", std::string("LIKE over ") + type_name(*t));
                if (e.args[1].kind != ExprKind::Literal || e.args[1].literal.type() != ValueType::Text)
                    report(Diagnostic::Kind::TypeMismatch, "", "LIKE pattern must be a string literal");
                return ValueType::Bool;
            }
            case ExprKind::CloseEnough: {
                if (e.args[0].kind != ExprKind::Literal || e.args[0].literal.type() != ValueType::Text)
                    report(Diagnostic::Kind::TypeMismatch, "", "CLOSE_ENOUGH pattern must be a string literal");
                if (e.args[1].kind != ExprKind::Column)
                    report(Diagnostic::Kind::TypeMismatch, "", "CLOSE_ENOUGH target must be a column");
                auto t = type_of(e.args[1], scope, ctx);
                if (t && *t != ValueType::Text && *t != ValueType::Null)
                    report(Diagnostic::Kind::TypeMismatch, "", std::string("CLOSE_ENOUGH over ") + type_name(*t));
                return ValueType::Bool;
            }
            case ExprKind::And:
            case ExprKind::Or:
            case ExprKind::Not: {
                for (auto& a : e.args) {
                    auto t = type_of(a, scope, ctx);
                    if (t && *t != ValueType::Bool && *t != ValueType::Null)
                        report(Diagnostic::Kind::TypeMismatch, "",
                               std::string("boolean operator over ") + type_name(*t) + " in '" + print(e) + "'");
                }
                return ValueType::Bool;
            }
            case ExprKind::Arith: {
                auto l = type_of(e.args[0], scope, ctx);
                auto r = type_of(e.args[1], scope, ctx);
                for (auto t : {l, r})
                    if (t && !is_numeric(*t) && *t != ValueType::Null)
                        report(Diagnostic::Kind::TypeMismatch, "",
                               std::string("arithmetic over ") + type_name(*t) + " in '" + print(e) + "'");
                if (!l || !r) return std::nullopt;
                if (*l == ValueType::Null || *r == ValueType::Null) return ValueType::Null;
                return (*l == ValueType::Int && *r == ValueType::Int) ? ValueType::Int : ValueType::Float;
            }
            case ExprKind::IsNull:
                type_of(e.args[0], scope, ctx);
                return ValueType::Bool;
            case ExprKind::Negate: {
                auto t = type_of(e.args[0], scope, ctx);
                if (t && !is_numeric(*t) && *t != ValueType::Null)
                    report(Diagnostic::Kind::TypeMismatch, "", std::string("negation of ") + type_name(*t));
                return t;
            }
            case ExprKind::InSubquery: {
                std::vector<std::optional<ValueType>> lhs;
                for (auto& a : e.args) lhs.push_back(type_of(a, scope, ctx));
                Analyzer inner(catalog_, mode_, max_repair_);
                auto outs = inner.analyze(*e.subquery, &scope);
                absorb(inner);
                if (outs.size() != e.args.size()) {
                    report(Diagnostic::Kind::TypeMismatch, "",
                           "IN compares " + std::to_string(e.args.size()) + " values with a subquery of " +
                               std::to_string(outs.size()) + " columns");
                } else {
                    for (std::size_t i = 0; i < outs.size(); ++i)
                        if (lhs[i] && !comparable(*lhs[i], outs[i].type, e.args[i], std::nullopt))
                            report(Diagnostic::Kind::TypeMismatch, "",
                                   std::string("IN compares ") + type_name(*lhs[i]) + " with " +
                                       type_name(outs[i].type));
                }
                return ValueType::Bool;
            }
            case ExprKind::Exists: {
                Analyzer inner(catalog_, mode_, max_repair_);
                inner.analyze(*e.subquery, &scope);
                absorb(inner);
                return ValueType::Bool;
            }
        }
        return std::nullopt;
    }

    static bool comparable(ValueType l, ValueType r, const Expr& le, const std::optional<Expr>& re) {
        if (l == ValueType::Null || r == ValueType::Null) return true;
        if (l == r) return true;
        if (is_numeric(l) && is_numeric(r)) return true;
        auto date_literal = [](const Expr& x) {
            return x.kind == ExprKind::Literal && x.literal.type() == ValueType::Text &&
                   Date::parse(x.literal.as_text()).has_value();
        };
        if (l == ValueType::Text && r == ValueType::Date) return date_literal(le);
        if (l == ValueType::Date && r == ValueType::Text) return re && date_literal(*re);
        return false;
    }

    std::optional<ValueType> column_type(ColumnRef& ref, const Scope& scope, Ctx) {
        auto res = resolve_column(scope, ref);
        if (res.ambiguous) {
            report(Diagnostic::Kind::AmbiguousColumn, ref.name, "ambiguous column '" + ref.name + "'");
            if (mode_ == Mode::Clean) unrepairable_.push_back("ambiguous column '" + ref.name + "'");
            return std::nullopt;
        }
        if (res.column) return res.column->type;
        if (!scope_chain_complete(scope)) return std::nullopt;
        auto cands = candidates_for(scope, ref);
        if (mode_ == Mode::Clean) {
            if (!cands.empty() && cands.front().distance <= max_repair_) {
                audit_.push_back("repaired column '" + ref.name + "' -> '" + cands.front().name + "' (distance " +
                                 std::to_string(cands.front().distance) + ")");
                ref.name = cands.front().name;
                auto fixed = resolve_column(scope, ref);
                return fixed.column ? std::optional(fixed.column->type) : std::nullopt;
            }
            if (in_droppable_clause_)
                ++unresolved_in_clause_;
            else
                unrepairable_.push_back("unknown column '" + ref.name + "'");
        }
        std::string msg = "unknown column '" + ref.name + "'";
        if (!cands.empty()) msg += "; did you mean '" + cands.front().name + "'?";
        const std::string name = ref.qualifier.empty() ? ref.name : ref.qualifier + "." + ref.name;
        report(Diagnostic::Kind::UnknownColumn, name, msg, std::move(cands));
        return std::nullopt;
    }

    static bool scope_chain_complete(const Scope& scope) {
        for (const Scope* s = &scope; s; s = s->outer)
            if (!s->complete) return false;
        return true;
    }

    bool matches_group(const Expr& e, const QueryAst& q, const Scope& scope) const {
        for (const auto& g : q.group_by) {
            if (g == e) return true;
            if (g.kind == ExprKind::Column && e.kind == ExprKind::Column) {
                auto a = resolve_column(scope, g.column), b = resolve_column(scope, e.column);
                if (a.column && a.column == b.column) return true;
            }
        }
        return false;
    }

    void check_grouped_expr(const Expr& e, const QueryAst& q, const Scope& scope, const char* clause) {
        if (e.kind == ExprKind::Agg || e.kind == ExprKind::Literal) return;
        if (e.kind == ExprKind::InSubquery || e.kind == ExprKind::Exists) {
            for (const auto& a : e.args) check_grouped_expr(a, q, scope, clause);
            return;
        }
        if (matches_group(e, q, scope)) return;
        if (e.kind == ExprKind::Column) {
            auto res = resolve_column(scope, e.column);
            if (res.column && res.depth > 0) return;  // outer reference, constant per block
            if (!res.column) return;                  // reported elsewhere
            report(Diagnostic::Kind::AggregateMisuse, e.column.name,
                   q.group_by.empty()
                       ? "column '" + e.column.name + "' mixed with aggregates without GROUP BY (" + clause + ")"
                       : "column '" + e.column.name + "' is neither grouped nor aggregated (" + clause + ")");
            return;
        }
        for (const auto& a : e.args) check_grouped_expr(a, q, scope, clause);
    }

    void check_grouping(const QueryAst& q, const Scope& scope) {
        for (const auto& g : q.group_by)
            if (contains_aggregate(g)) report(Diagnostic::Kind::AggregateMisuse, "", "aggregate in GROUP BY");
        for (const auto& s : q.select_items)
            if (s.expr.kind != ExprKind::Star) check_grouped_expr(s.expr, q, scope, "SELECT");
        if (q.having) check_grouped_expr(*q.having, q, scope, "HAVING");
        for (const auto& o : q.order_by) {
            if (o.expr.kind == ExprKind::Column && o.expr.column.qualifier.empty() && alias_of(q, o.expr.column.name))
                continue;
            check_grouped_expr(o.expr, q, scope, "ORDER BY");
        }
    }

    const Catalog& catalog_;
    Mode mode_;
    std::size_t max_repair_;
    std::vector<Diagnostic> diags_;
    std::vector<std::string> audit_;
    std::vector<std::string> unrepairable_;
    std::size_t unresolved_in_clause_ = 0;
    bool in_droppable_clause_ = false;
    std::size_t diag_mark_ = 0;
};

/// Reports every problem that would stop the query from executing. An empty
/// result means the query is executable against `catalog`.
inline std::vector<Diagnostic> validate(const QueryAst& ast, const Catalog& catalog) {
    QueryAst copy = ast;
    Analyzer a(catalog, Analyzer::Mode::Validate);
    a.analyze(copy);
    return std::move(a.diagnostics());
}

/// Output columns of a query, with inferred types.
inline std::vector<ScopeColumn> output_columns(const QueryAst& ast, const Catalog& catalog,
                                               const Scope* outer = nullptr) {
    QueryAst copy = ast;
    Analyzer a(catalog, Analyzer::Mode::Silent);
    return a.analyze(copy, outer);
}

/// Columns visible inside `ast`'s own block.
inline Scope block_scope(const QueryAst& ast, const Catalog& catalog, const Scope* outer = nullptr) {
    Scope scope;
    scope.outer = outer;
    for (const auto& ref : ast.from) {
        if (ref.is_subquery()) {
            for (auto& c : output_columns(*ref.subquery, catalog)) scope.columns.push_back({ref.alias, c.name, c.type});
            continue;
        }
        const View* view = catalog.find(ref.view);
        if (!view) {
            scope.complete = false;
            continue;
        }
        for (const auto& c : view->table.schema.columns) scope.columns.push_back({ref.scope_name(), c.name, c.type});
    }
    return scope;
}

}  // namespace postview::sql
