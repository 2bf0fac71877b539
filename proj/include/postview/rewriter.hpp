#pragma once

#include <string>
#include <vector>

#include "postview/catalog.hpp"
#include "postview/match.hpp"
#include "postview/sql_analyzer.hpp"
#include "postview/sql_ast.hpp"
#include "postview/sql_printer.hpp"

namespace postview {

class RewriteError : public Error {
public:
    using Error::Error;
};

struct RelaxConfig {
    double similarity_threshold = 0.8;
    std::size_t max_repair_distance = 2;
};

struct Rewrite {
    sql::QueryAst ast;
    std::vector<std::string> audit;
};

/// Repairs misspelled column references and drops WHERE/HAVING conjuncts
/// that reference columns with no close candidate.
inline Rewrite clean(const sql::QueryAst& ast, const Catalog& catalog, const RelaxConfig& config = {}) {
    Rewrite out{ast, {}};
    sql::Analyzer a(catalog, sql::Analyzer::Mode::Clean, config.max_repair_distance);
    a.analyze(out.ast);
    out.audit = a.audit();
    if (!a.unrepairable().empty())
        throw RewriteError("unrepairable query: unknown column '" + a.unrepairable().front() + "'");
    auto remaining = sql::validate(out.ast, catalog);
    if (!remaining.empty()) throw RewriteError("unrepairable query: " + remaining.front().message);
    return out;
}

namespace rewrite_detail {

using sql::Expr;
using sql::ExprKind;

inline bool is_column(const Expr& e) { return e.kind == ExprKind::Column; }
inline bool is_text_literal(const Expr& e) {
    return e.kind == ExprKind::Literal && e.literal.type() == ValueType::Text;
}

// `(c LIKE p OR CLOSE_ENOUGH(p, c))`, the fixed point of relaxation.
inline bool is_relaxed_pair(const Expr& e) {
    if (e.kind != ExprKind::Or || e.args.size() != 2) return false;
    const Expr& l = e.args[0];
    const Expr& r = e.args[1];
    return l.kind == ExprKind::Like && r.kind == ExprKind::CloseEnough && l.args[0] == r.args[1] &&
           l.args[1] == r.args[0];
}

class Relaxer {
public:
    Relaxer(const Catalog& catalog, std::vector<std::string>& audit) : catalog_(catalog), audit_(audit) {}

    void block(sql::QueryAst& q, const sql::Scope* outer) {
        for (auto& ref : q.from)
            if (ref.is_subquery()) block(*ref.subquery, nullptr);
        sql::Scope scope = sql::block_scope(q, catalog_, outer);
        if (q.where) expr(*q.where, scope);
        if (q.having) expr(*q.having, scope);
    }

private:
    bool text_column(const Expr& e, const sql::Scope& scope) const {
        if (!is_column(e)) return false;
        auto res = sql::resolve_column(scope, e.column);
        return res.column && res.column->type == ValueType::Text;
    }

    static Expr relaxed(const Expr& column, const std::string& pattern) {
        return sql::logical(ExprKind::Or, {sql::like(column, pattern), sql::close_enough(pattern, column)});
    }

    void expr(Expr& e, const sql::Scope& scope) {
        switch (e.kind) {
            case ExprKind::Not:
                audit_.push_back("not relaxed under NOT: " + sql::print(e.args[0]));
                return;
            case ExprKind::Compare: {
                if (e.compare != sql::CompareOp::Eq) return;
                int c = -1;
                if (text_column(e.args[0], scope) && is_text_literal(e.args[1])) c = 0;
                else if (text_column(e.args[1], scope) && is_text_literal(e.args[0])) c = 1;
                if (c < 0) return;
                const std::string before = sql::print(e);
                Expr column = e.args[static_cast<std::size_t>(c)];
                const std::string pattern = "%" + e.args[static_cast<std::size_t>(1 - c)].literal.as_text() + "%";
                e = relaxed(column, pattern);
                audit_.push_back("relaxed '" + before + "' -> '" + sql::print(e) + "'");
                return;
            }
            case ExprKind::Like: {
                if (!text_column(e.args[0], scope)) return;
                const std::string before = sql::print(e);
                e = relaxed(e.args[0], e.args[1].literal.as_text());
                audit_.push_back("relaxed '" + before + "' -> '" + sql::print(e) + "'");
                return;
            }
            case ExprKind::Or:
                if (is_relaxed_pair(e)) return;
                [[fallthrough]];
            case ExprKind::And:
                for (auto& a : e.args) expr(a, scope);
                return;
            case ExprKind::InSubquery:
            case ExprKind::Exists:
                block(*e.subquery, &scope);
                return;
            default: return;
        }
    }

    const Catalog& catalog_;
    std::vector<std::string>& audit_;
};

}  // namespace rewrite_detail

/// Weakens text equality to LIKE and LIKE to `LIKE OR CLOSE_ENOUGH`.
/// Predicates under NOT are left alone. Idempotent.
inline Rewrite relax(const sql::QueryAst& ast, const Catalog& catalog, const RelaxConfig& = {}) {
    Rewrite out{ast, {}};
    rewrite_detail::Relaxer(catalog, out.audit).block(out.ast, nullptr);
    return out;
}

}  // namespace postview
