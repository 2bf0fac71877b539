#pragma once

#include <string>

#include "postview/sql_ast.hpp"
#include "postview/sql_parser.hpp"

namespace postview::sql {

namespace detail {

inline bool is_plain_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(text::is_alnum(c) || c == '_')) return false;
    const std::string upper = text::to_upper(s);
    return !keywords().count(upper) && !unsupported_keywords().count(upper);
}

inline std::string quote_identifier(const std::string& s) {
    if (is_plain_identifier(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

inline std::string quote_string(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    return out + "'";
}

inline std::string print_literal(const Value& v) {
    switch (v.type()) {
        case ValueType::Null: return "NULL";
        case ValueType::Bool: return v.as_bool() ? "TRUE" : "FALSE";
        case ValueType::Int: return std::to_string(v.as_int());
        case ValueType::Float: {
            std::string s = format_double(v.as_float());
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            return s;
        }
        case ValueType::Text: return quote_string(v.as_text());
        case ValueType::Date: return quote_string(v.as_date().to_string());
    }
    return "NULL";
}

// Binding strength, loosest first. OR always prints parenthesized, so it
// behaves like a primary.
inline int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::And: return 2;
        case ExprKind::Not: return 3;
        case ExprKind::Compare:
        case ExprKind::Like:
        case ExprKind::IsNull:
        case ExprKind::InSubquery: return 4;
        case ExprKind::Arith: return (e.arith == ArithOp::Add || e.arith == ArithOp::Sub) ? 5 : 6;
        case ExprKind::Negate: return 7;
        default: return 8;
    }
}

inline std::string print_query(const QueryAst& q);

inline std::string print_expr(const Expr& e, int min_prec = 0);

inline std::string wrap(const Expr& e, int min_prec) {
    std::string s = print_expr(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

inline std::string print_expr(const Expr& e, int min_prec) {
    if (min_prec > 0) return wrap(e, min_prec);
    switch (e.kind) {
        case ExprKind::Column:
            return e.column.qualifier.empty()
                       ? quote_identifier(e.column.name)
                       : quote_identifier(e.column.qualifier) + "." + quote_identifier(e.column.name);
        case ExprKind::Literal: return print_literal(e.literal);
        case ExprKind::Star: return "*";
        case ExprKind::Compare:
            return wrap(e.args[0], 5) + " " + to_string(e.compare) + " " + wrap(e.args[1], 5);
        case ExprKind::Like: return wrap(e.args[0], 5) + " LIKE " + print_expr(e.args[1]);
        case ExprKind::CloseEnough: return "CLOSE_ENOUGH(" + print_expr(e.args[0]) + ", " + print_expr(e.args[1]) + ")";
        case ExprKind::And: {
            std::string out;
            for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? " AND " : "") + wrap(e.args[i], 3);
            return out;
        }
        case ExprKind::Or: {
            std::string out = "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? " OR " : "") + wrap(e.args[i], 2);
            return out + ")";
        }
        case ExprKind::Not:
            if (e.args[0].kind == ExprKind::IsNull) return wrap(e.args[0].args[0], 5) + " IS NOT NULL";
            return "NOT " + wrap(e.args[0], 3);
        case ExprKind::IsNull: return wrap(e.args[0], 5) + " IS NULL";
        case ExprKind::Arith: {
            const int p = precedence(e);
            return wrap(e.args[0], p) + " " + to_string(e.arith) + " " + wrap(e.args[1], p + 1);
        }
        case ExprKind::Negate:
            return e.args[0].kind == ExprKind::Column ? "-" + print_expr(e.args[0]) : "-(" + print_expr(e.args[0]) + ")";
        case ExprKind::Agg:
            if (e.agg == AggFn::CountStar) return "COUNT(*)";
            return std::string(to_string(e.agg)) + "(" + print_expr(e.args[0]) + ")";
        case ExprKind::InSubquery: {
            std::string lhs;
            if (e.args.size() == 1) {
                lhs = wrap(e.args[0], 5);
            } else {
                lhs = "(";
                for (std::size_t i = 0; i < e.args.size(); ++i) lhs += (i ? ", " : "") + print_expr(e.args[i]);
                lhs += ")";
            }
            return lhs + " IN (" + print_query(*e.subquery) + ")";
        }
        case ExprKind::Exists: return "EXISTS (" + print_query(*e.subquery) + ")";
    }
    return {};
}

inline std::string print_query(const QueryAst& q) {
    std::string out = "SELECT ";
    if (q.distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < q.select_items.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(q.select_items[i].expr);
        if (!q.select_items[i].alias.empty()) out += " AS " + quote_identifier(q.select_items[i].alias);
    }
    out += " FROM ";
    for (std::size_t i = 0; i < q.from.size(); ++i) {
        if (i) out += ", ";
        const TableRef& t = q.from[i];
        out += t.is_subquery() ? "(" + print_query(*t.subquery) + ")" : quote_identifier(t.view);
        if (!t.alias.empty()) out += " AS " + quote_identifier(t.alias);
    }
    if (q.where) out += " WHERE " + print_expr(*q.where);
    if (!q.group_by.empty()) {
        out += " GROUP BY ";
        for (std::size_t i = 0; i < q.group_by.size(); ++i) out += (i ? ", " : "") + print_expr(q.group_by[i]);
    }
    if (q.having) out += " HAVING " + print_expr(*q.having);
    if (!q.order_by.empty()) {
        out += " ORDER BY ";
        for (std::size_t i = 0; i < q.order_by.size(); ++i)
            out += (i ? ", " : "") + print_expr(q.order_by[i].expr) + (q.order_by[i].descending ? " DESC" : "");
    }
    if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
    return out;
}

}  // namespace detail

/// Canonical one-line SQL. parse(print(q)) == q for every representable AST.
inline std::string print(const QueryAst& q) { return detail::print_query(q); }

inline std::string print(const Expr& e) { return detail::print_expr(e); }

}  // namespace postview::sql
