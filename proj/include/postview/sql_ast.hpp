#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "postview/value.hpp"

namespace postview::sql {

/// Owning pointer with deep-copy value semantics, for recursive AST nodes.
template <typename T>
class Box {
public:
    Box() = default;
    Box(T value) : p_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& o) : p_(o.p_ ? std::make_unique<T>(*o.p_) : nullptr) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& o) {
        if (this != &o) p_ = o.p_ ? std::make_unique<T>(*o.p_) : nullptr;
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    explicit operator bool() const { return p_ != nullptr; }
    T& operator*() { return *p_; }
    const T& operator*() const { return *p_; }
    T* operator->() { return p_.get(); }
    const T* operator->() const { return p_.get(); }
    const T* get() const { return p_.get(); }

    friend bool operator==(const Box& a, const Box& b) {
        if (!a.p_ || !b.p_) return !a.p_ && !b.p_;
        return *a.p_ == *b.p_;
    }

private:
    std::unique_ptr<T> p_;
};

enum class ExprKind {
    Column,
    Literal,
    Star,         // bare `*` in a select list
    Compare,      // args[0] op args[1]
    Like,         // args[0] LIKE args[1]; args[1] is a Text literal
    CloseEnough,  // CLOSE_ENOUGH(args[0] pattern literal, args[1] column)
    And,          // n-ary, >= 2 args
    Or,           // n-ary, >= 2 args
    Not,
    Arith,        // args[0] op args[1]
    Negate,       // unary minus over a non-literal
    Agg,          // args empty for COUNT(*)
    InSubquery,   // (args...) IN (subquery)
    IsNull,       // args[0] IS NULL; IS NOT NULL is Not(IsNull)
    Exists,
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div };
enum class AggFn { CountStar, Count, Sum, Avg, Min, Max };

inline const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

inline const char* to_string(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
    }
    return "?";
}

inline const char* to_string(AggFn fn) {
    switch (fn) {
        case AggFn::CountStar:
        case AggFn::Count: return "COUNT";
        case AggFn::Sum: return "SUM";
        case AggFn::Avg: return "AVG";
        case AggFn::Min: return "MIN";
        case AggFn::Max: return "MAX";
    }
    return "?";
}

struct ColumnRef {
    std::string qualifier;  // empty when unqualified
    std::string name;

    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct QueryAst;

struct Expr {
    ExprKind kind = ExprKind::Literal;
    ColumnRef column;
    Value literal;
    CompareOp compare = CompareOp::Eq;
    ArithOp arith = ArithOp::Add;
    AggFn agg = AggFn::CountStar;
    std::vector<Expr> args;
    Box<QueryAst> subquery;

    friend bool operator==(const Expr&, const Expr&) = default;

    bool is(ExprKind k) const { return kind == k; }
};

struct SelectItem {
    Expr expr;
    std::string alias;

    friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

struct TableRef {
    std::string view;          // set for a named view
    Box<QueryAst> subquery;    // set for a derived table
    std::string alias;

    bool is_subquery() const { return static_cast<bool>(subquery); }
    /// Name used to qualify columns from this source.
    const std::string& scope_name() const { return alias.empty() ? view : alias; }

    friend bool operator==(const TableRef&, const TableRef&) = default;
};

struct OrderItem {
    Expr expr;
    bool descending = false;

    friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

struct QueryAst {
    std::vector<SelectItem> select_items;
    bool distinct = false;
    std::vector<TableRef> from;
    std::optional<Expr> where;
    std::vector<Expr> group_by;
    std::optional<Expr> having;
    std::vector<OrderItem> order_by;
    std::optional<std::int64_t> limit;

    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

// ---------------------------------------------------------------------------
// Constructors used by the parser, the rewriter, and tests.

inline Expr col(std::string name, std::string qualifier = {}) {
    Expr e;
    e.kind = ExprKind::Column;
    e.column = {std::move(qualifier), std::move(name)};
    return e;
}

inline Expr lit(Value v) {
    Expr e;
    e.kind = ExprKind::Literal;
    e.literal = std::move(v);
    return e;
}

inline Expr star() {
    Expr e;
    e.kind = ExprKind::Star;
    return e;
}

inline Expr cmp(CompareOp op, Expr l, Expr r) {
    Expr e;
    e.kind = ExprKind::Compare;
    e.compare = op;
    e.args = {std::move(l), std::move(r)};
    return e;
}

inline Expr like(Expr target, std::string pattern) {
    Expr e;
    e.kind = ExprKind::Like;
    e.args = {std::move(target), lit(std::move(pattern))};
    return e;
}

inline Expr close_enough(std::string pattern, Expr target) {
    Expr e;
    e.kind = ExprKind::CloseEnough;
    e.args = {lit(std::move(pattern)), std::move(target)};
    return e;
}

inline Expr logical(ExprKind kind, std::vector<Expr> args) {
    Expr e;
    e.kind = kind;
    e.args = std::move(args);
    return e;
}

inline Expr negation(Expr inner) {
    Expr e;
    e.kind = ExprKind::Not;
    e.args = {std::move(inner)};
    return e;
}

inline Expr arith(ArithOp op, Expr l, Expr r) {
    Expr e;
    e.kind = ExprKind::Arith;
    e.arith = op;
    e.args = {std::move(l), std::move(r)};
    return e;
}

inline Expr agg(AggFn fn, std::optional<Expr> arg = std::nullopt) {
    Expr e;
    e.kind = ExprKind::Agg;
    e.agg = arg ? fn : AggFn::CountStar;
    if (arg) e.args.push_back(std::move(*arg));
    return e;
}

inline Expr in_subquery(std::vector<Expr> lhs, QueryAst q) {
    Expr e;
    e.kind = ExprKind::InSubquery;
    e.args = std::move(lhs);
    e.subquery = Box<QueryAst>(std::move(q));
    return e;
}

inline Expr is_null(Expr operand) {
    Expr e;
    e.kind = ExprKind::IsNull;
    e.args.push_back(std::move(operand));
    return e;
}

inline Expr exists(QueryAst q) {
    Expr e;
    e.kind = ExprKind::Exists;
    e.subquery = Box<QueryAst>(std::move(q));
    return e;
}

/// Joins conjuncts into one expression (n-ary AND); empty input yields nullopt.
inline std::optional<Expr> conjoin(std::vector<Expr> parts) {
    if (parts.empty()) return std::nullopt;
    if (parts.size() == 1) return std::move(parts.front());
    return logical(ExprKind::And, std::move(parts));
}

/// Top-level AND conjuncts of a predicate.
inline std::vector<Expr> conjuncts(const Expr& e) {
    if (e.kind == ExprKind::And) return e.args;
    return {e};
}

inline bool contains_aggregate(const Expr& e) {
    if (e.kind == ExprKind::Agg) return true;
    for (const auto& a : e.args)
        if (contains_aggregate(a)) return true;
    return false;
}

inline bool is_aggregate_block(const QueryAst& q) {
    if (!q.group_by.empty()) return true;
    for (const auto& s : q.select_items)
        if (contains_aggregate(s.expr)) return true;
    if (q.having && contains_aggregate(*q.having)) return true;
    for (const auto& o : q.order_by)
        if (contains_aggregate(o.expr)) return true;
    return q.having.has_value();
}

/// True if a NOT sits above an IN or EXISTS subquery anywhere in `e` (not
/// descending into the subqueries themselves).
inline bool has_negated_subquery(const Expr& e, bool under_not = false) {
    if (e.kind == ExprKind::Not) under_not = true;
    if ((e.kind == ExprKind::InSubquery || e.kind == ExprKind::Exists) && under_not) return true;
    for (const auto& a : e.args)
        if (has_negated_subquery(a, under_not)) return true;
    return false;
}

inline bool block_has_negated_subquery(const QueryAst& q) {
    return (q.where && has_negated_subquery(*q.where)) || (q.having && has_negated_subquery(*q.having));
}

}  // namespace postview::sql
