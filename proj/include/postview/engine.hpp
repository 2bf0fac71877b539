#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "postview/catalog.hpp"
#include "postview/match.hpp"
#include "postview/provenance.hpp"
#include "postview/sql_analyzer.hpp"
#include "postview/sql_ast.hpp"

namespace postview {

class EngineError : public Error {
public:
    using Error::Error;
};

/// Raised for NOT IN / NOT EXISTS, whose provenance the engine does not model.
class NegationUnsupported : public EngineError {
public:
    using EngineError::EngineError;
};

struct CellSource {
    TupleId tuple;
    std::string column;

    friend bool operator==(const CellSource&, const CellSource&) = default;
    friend bool operator<(const CellSource& a, const CellSource& b) {
        if (!(a.tuple == b.tuple)) return a.tuple < b.tuple;
        return a.column < b.column;
    }
};

/// Where-provenance of one output cell.
using WhereProv = std::set<CellSource>;

struct AnnotatedRow {
    Row values;
    Polynomial polynomial;
    std::vector<WhereProv> where;  // one per cell
    TupleSet contributing;
};

struct AnnotatedTable {
    std::vector<Column> columns;
    std::vector<AnnotatedRow> rows;
    /// Union of contributing tuples of every nested block (FROM, IN and
    /// EXISTS subqueries) evaluated for this query.
    TupleSet nested_contributing;
    std::vector<std::string> warnings;

    /// Union of row contributing sets and nested_contributing.
    TupleSet all_contributing() const {
        TupleSet out = nested_contributing;
        for (const auto& r : rows) out.insert(r.contributing.begin(), r.contributing.end());
        return out;
    }
};

struct EvalOptions {
    double close_enough_threshold = 0.8;
};

inline WhySet why(const AnnotatedRow& row) { return why_of(row.polynomial); }

namespace engine_detail {

using sql::QueryAst;

enum class Tri { False, True, Unknown };

struct PredResult {
    Tri value = Tri::False;
    Polynomial factor = Polynomial::one();  // meaningful when value == True
};

struct Cell {
    Value value;
    WhereProv where;
};

struct Binding {
    std::string qualifier;
    std::string name;
};

struct WorkRow {
    Row values;
    std::vector<WhereProv> where;
    Polynomial poly;
    TupleSet lineage;
};

struct Relation {
    std::vector<Binding> columns;
    std::vector<WorkRow> rows;
};

struct Frame {
    const Relation* rel = nullptr;
    const WorkRow* row = nullptr;                       // current row, or a group's first member
    const std::vector<const WorkRow*>* group = nullptr;  // set in aggregate context
    const Frame* outer = nullptr;
};

// Static check: does any column reference in `q` resolve outside `q`?
inline bool references_outside(const QueryAst& q, const Catalog& catalog, const sql::Scope* outer, int depth_limit);

inline bool expr_references_outside(const sql::Expr& e, const sql::Scope& scope, const Catalog& catalog,
                                    int depth_limit, const QueryAst* aliases_of) {
    using sql::ExprKind;
    if (e.kind == ExprKind::Column) {
        if (aliases_of && e.column.qualifier.empty())
            for (const auto& s : aliases_of->select_items)
                if (!s.alias.empty() && text::iequals(s.alias, e.column.name)) return false;
        auto res = sql::resolve_column(scope, e.column);
        return !res.column || res.depth > depth_limit;
    }
    if ((e.kind == ExprKind::InSubquery || e.kind == ExprKind::Exists) &&
        references_outside(*e.subquery, catalog, &scope, depth_limit + 1))
        return true;
    for (const auto& a : e.args)
        if (expr_references_outside(a, scope, catalog, depth_limit, nullptr)) return true;
    return false;
}

inline bool references_outside(const QueryAst& q, const Catalog& catalog, const sql::Scope* outer, int depth_limit) {
    sql::Scope scope = sql::block_scope(q, catalog, outer);
    auto check = [&](const sql::Expr& e, const QueryAst* aliases) {
        return expr_references_outside(e, scope, catalog, depth_limit, aliases);
    };
    for (const auto& s : q.select_items)
        if (s.expr.kind != sql::ExprKind::Star && check(s.expr, nullptr)) return true;
    if (q.where && check(*q.where, nullptr)) return true;
    for (const auto& g : q.group_by)
        if (check(g, nullptr)) return true;
    if (q.having && check(*q.having, nullptr)) return true;
    for (const auto& o : q.order_by)
        if (check(o.expr, &q)) return true;
    return false;
}

inline bool contains_subquery(const sql::Expr& e) {
    if (e.kind == sql::ExprKind::InSubquery || e.kind == sql::ExprKind::Exists) return true;
    for (const auto& a : e.args)
        if (contains_subquery(a)) return true;
    return false;
}

class Evaluator {
public:
    Evaluator(const Catalog& catalog, const EvalOptions& options) : catalog_(catalog), options_(options) {}

    AnnotatedTable run(const QueryAst& q) {
        AnnotatedTable out = eval_block(q, nullptr);
        out.nested_contributing = std::move(nested_);
        out.warnings = std::move(warnings_);
        return out;
    }

private:
    using Expr = sql::Expr;
    using ExprKind = sql::ExprKind;

    AnnotatedTable eval_nested(const QueryAst& q, const Frame* outer) {
        AnnotatedTable t = eval_block(q, outer);
        for (const auto& r : t.rows) nested_.insert(r.contributing.begin(), r.contributing.end());
        return t;
    }

    // Uncorrelated IN/EXISTS subqueries are evaluated once per query.
    const AnnotatedTable& subquery_result(const QueryAst& q, const Frame* outer) {
        auto cached = cache_.find(&q);
        if (cached != cache_.end()) return cached->second;
        auto corr = correlated_.find(&q);
        if (corr == correlated_.end())
            corr = correlated_.emplace(&q, references_outside(q, catalog_, nullptr, 0)).first;
        if (!corr->second) return cache_.emplace(&q, eval_nested(q, nullptr)).first->second;
        scratch_.push_back(eval_nested(q, outer));
        return scratch_.back();
    }

    Relation scan(const sql::TableRef& ref) {
        Relation rel;
        if (ref.is_subquery()) {
            AnnotatedTable t = eval_nested(*ref.subquery, nullptr);
            for (const auto& c : t.columns) rel.columns.push_back({ref.alias, c.name});
            for (auto& r : t.rows)
                rel.rows.push_back({std::move(r.values), std::move(r.where), std::move(r.polynomial),
                                    std::move(r.contributing)});
            return rel;
        }
        const View& view = catalog_.get(ref.view);
        const auto& schema = view.table.schema;
        for (const auto& c : schema.columns) rel.columns.push_back({ref.scope_name(), c.name});
        rel.rows.reserve(view.table.rows.size());
        for (const auto& row : view.table.rows) {
            TupleId id{view.name, view.table.key_of(row)};
            WorkRow w;
            w.values = row;
            w.where.reserve(row.size());
            for (const auto& c : schema.columns) w.where.push_back({CellSource{id, c.name}});
            w.poly = Polynomial::var(id);
            w.lineage = {id};
            rel.rows.push_back(std::move(w));
        }
        return rel;
    }

    static Relation product(Relation a, const Relation& b) {
        Relation out;
        out.columns = std::move(a.columns);
        out.columns.insert(out.columns.end(), b.columns.begin(), b.columns.end());
        out.rows.reserve(a.rows.size() * b.rows.size());
        for (const auto& ra : a.rows)
            for (const auto& rb : b.rows) {
                WorkRow w;
                w.values = ra.values;
                w.values.insert(w.values.end(), rb.values.begin(), rb.values.end());
                w.where = ra.where;
                w.where.insert(w.where.end(), rb.where.begin(), rb.where.end());
                w.poly = ra.poly * rb.poly;
                w.lineage = ra.lineage;
                w.lineage.insert(rb.lineage.begin(), rb.lineage.end());
                out.rows.push_back(std::move(w));
            }
        return out;
    }

    // -- expression evaluation ------------------------------------------------

    static std::optional<std::size_t> find_column(const Relation& rel, const sql::ColumnRef& ref) {
        for (std::size_t i = 0; i < rel.columns.size(); ++i) {
            if (!text::iequals(rel.columns[i].name, ref.name)) continue;
            if (!ref.qualifier.empty() && !text::iequals(rel.columns[i].qualifier, ref.qualifier)) continue;
            return i;
        }
        return std::nullopt;
    }

    Cell column_cell(const sql::ColumnRef& ref, const Frame& frame) {
        for (const Frame* f = &frame; f; f = f->outer) {
            auto idx = find_column(*f->rel, ref);
            if (!idx) continue;
            if (f->group) {
                // grouped column: the value is shared, the sources are every member's cell
                Cell c;
                if (!f->group->empty()) c.value = f->group->front()->values[*idx];
                for (const WorkRow* m : *f->group) c.where.insert(m->where[*idx].begin(), m->where[*idx].end());
                return c;
            }
            if (!f->row) return {};
            return {f->row->values[*idx], f->row->where[*idx]};
        }
        throw EngineError("unresolved column '" + ref.name + "'");
    }

    void warn(std::string msg) {
        if (std::find(warnings_.begin(), warnings_.end(), msg) == warnings_.end()) warnings_.push_back(std::move(msg));
    }

    Value arithmetic(sql::ArithOp op, const Value& a, const Value& b) {
        if (a.is_null() || b.is_null()) return {};
        if (!is_numeric(a.type()) || !is_numeric(b.type())) throw EngineError("arithmetic over non-numeric values");
        if (a.type() == ValueType::Int && b.type() == ValueType::Int) {
            const std::int64_t x = a.as_int(), y = b.as_int();
            switch (op) {
                case sql::ArithOp::Add: return x + y;
                case sql::ArithOp::Sub: return x - y;
                case sql::ArithOp::Mul: return x * y;
                case sql::ArithOp::Div:
                    if (y == 0) {
                        warn("division by zero yields NULL");
                        return {};
                    }
                    return x / y;
            }
        }
        const double x = a.numeric(), y = b.numeric();
        switch (op) {
            case sql::ArithOp::Add: return x + y;
            case sql::ArithOp::Sub: return x - y;
            case sql::ArithOp::Mul: return x * y;
            case sql::ArithOp::Div:
                if (y == 0.0) {
                    warn("division by zero yields NULL");
                    return {};
                }
                return x / y;
        }
        return {};
    }

    Cell aggregate(const Expr& e, const Frame& frame) {
        if (!frame.group) throw EngineError("aggregate outside an aggregate query");
        const auto& members = *frame.group;
        if (e.agg == sql::AggFn::CountStar) return {Value(static_cast<std::int64_t>(members.size())), {}};
        std::vector<Cell> inputs;
        inputs.reserve(members.size());
        for (const WorkRow* m : members) {
            Frame row_frame{frame.rel, m, nullptr, frame.outer};
            inputs.push_back(scalar(e.args[0], row_frame));
        }
        std::vector<const Cell*> present;
        for (const auto& c : inputs)
            if (!c.value.is_null()) present.push_back(&c);
        switch (e.agg) {
            case sql::AggFn::Count: return {Value(static_cast<std::int64_t>(present.size())), {}};
            case sql::AggFn::Sum:
            case sql::AggFn::Avg: {
                if (present.empty()) return {};
                bool all_int = true;
                std::int64_t isum = 0;
                double fsum = 0.0;
                for (const Cell* c : present) {
                    if (!is_numeric(c->value.type())) throw EngineError("SUM/AVG over non-numeric values");
                    if (c->value.type() == ValueType::Int) {
                        isum += c->value.as_int();
                    } else {
                        all_int = false;
                    }
                    fsum += c->value.numeric();
                }
                if (e.agg == sql::AggFn::Avg) return {Value(fsum / static_cast<double>(present.size())), {}};
                return {all_int ? Value(isum) : Value(fsum), {}};
            }
            case sql::AggFn::Min:
            case sql::AggFn::Max: {
                if (present.empty()) return {};
                const Cell* best = present.front();
                for (const Cell* c : present) {
                    auto ord = sort_compare(c->value, best->value);
                    if (e.agg == sql::AggFn::Min ? ord < 0 : ord > 0) best = c;
                }
                Cell out{best->value, {}};
                for (const Cell* c : present)
                    if (sort_compare(c->value, best->value) == 0) out.where.insert(c->where.begin(), c->where.end());
                return out;
            }
            default: break;
        }
        return {};
    }

    Cell scalar(const Expr& e, const Frame& frame) {
        switch (e.kind) {
            case ExprKind::Column: return column_cell(e.column, frame);
            case ExprKind::Literal: return {e.literal, {}};
            case ExprKind::Arith: {
                Cell a = scalar(e.args[0], frame), b = scalar(e.args[1], frame);
                return {arithmetic(e.arith, a.value, b.value), {}};
            }
            case ExprKind::Negate: {
                Cell a = scalar(e.args[0], frame);
                if (a.value.is_null()) return {};
                if (a.value.type() == ValueType::Int) return {Value(-a.value.as_int()), {}};
                if (a.value.type() == ValueType::Float) return {Value(-a.value.as_float()), {}};
                throw EngineError("negation of a non-numeric value");
            }
            case ExprKind::Agg: return aggregate(e, frame);
            case ExprKind::Star: throw EngineError("'*' outside a select list");
            default: {
                PredResult p = predicate(e, frame);
                if (p.value == Tri::Unknown) return {};
                return {Value(p.value == Tri::True), {}};
            }
        }
    }

    static Tri tri(bool b) { return b ? Tri::True : Tri::False; }

    PredResult predicate(const Expr& e, const Frame& frame) {
        switch (e.kind) {
            case ExprKind::Compare: {
                Cell a = scalar(e.args[0], frame), b = scalar(e.args[1], frame);
                auto ord = sql_compare(a.value, b.value);
                if (!ord) return {Tri::Unknown, Polynomial::one()};
                bool r = false;
                switch (e.compare) {
                    case sql::CompareOp::Eq: r = *ord == 0; break;
                    case sql::CompareOp::Ne: r = *ord != 0; break;
                    case sql::CompareOp::Lt: r = *ord < 0; break;
                    case sql::CompareOp::Le: r = *ord <= 0; break;
                    case sql::CompareOp::Gt: r = *ord > 0; break;
                    case sql::CompareOp::Ge: r = *ord >= 0; break;
                }
                return {tri(r), Polynomial::one()};
            }
            case ExprKind::Like: {
                Cell a = scalar(e.args[0], frame);
                if (a.value.is_null()) return {Tri::Unknown, Polynomial::one()};
                return {tri(like_match(a.value.to_string(), e.args[1].literal.as_text())), Polynomial::one()};
            }
            case ExprKind::CloseEnough: {
                Cell a = scalar(e.args[1], frame);
                if (a.value.is_null()) return {Tri::Unknown, Polynomial::one()};
                return {tri(close_enough(e.args[0].literal.as_text(), a.value.to_string(),
                                         options_.close_enough_threshold)), Polynomial::one()};
            }
            case ExprKind::And: {
                PredResult out{Tri::True, Polynomial::one()};
                for (const auto& a : e.args) {
                    PredResult p = predicate(a, frame);
                    if (p.value == Tri::False) return {Tri::False, Polynomial::one()};
                    if (p.value == Tri::Unknown) out.value = Tri::Unknown;
                    else if (!p.factor.is_one()) out.factor *= p.factor;
                }
                return out;
            }
            case ExprKind::Or: {
                PredResult out{Tri::False, Polynomial::zero()};
                bool unknown = false;
                for (const auto& a : e.args) {
                    PredResult p = predicate(a, frame);
                    if (p.value == Tri::True) {
                        out.value = Tri::True;
                        out.factor = out.factor.union_with(p.factor);
                    } else if (p.value == Tri::Unknown) {
                        unknown = true;
                    }
                }
                if (out.value == Tri::True) return out;
                return {unknown ? Tri::Unknown : Tri::False, Polynomial::one()};
            }
            case ExprKind::IsNull: return {tri(scalar(e.args[0], frame).value.is_null()), Polynomial::one()};
            case ExprKind::Not: {
                if (contains_subquery(e.args[0]))
                    throw NegationUnsupported("negated subqueries (NOT IN / NOT EXISTS) are not supported");
                PredResult p = predicate(e.args[0], frame);
                if (p.value == Tri::Unknown) return {Tri::Unknown, Polynomial::one()};
                return {p.value == Tri::True ? Tri::False : Tri::True, Polynomial::one()};
            }
            case ExprKind::InSubquery: {
                std::vector<Cell> lhs;
                bool lhs_null = false;
                for (const auto& a : e.args) {
                    lhs.push_back(scalar(a, frame));
                    lhs_null = lhs_null || lhs.back().value.is_null();
                }
                const AnnotatedTable& sub = subquery_result(*e.subquery, &frame);
                Polynomial matched;
                bool any = false, unknown = lhs_null;
                for (const auto& row : sub.rows) {
                    bool eq = true, unk = false;
                    for (std::size_t i = 0; i < lhs.size(); ++i) {
                        auto ord = sql_compare(lhs[i].value, row.values[i]);
                        if (!ord) unk = true;
                        else if (*ord != 0) eq = false;
                    }
                    if (eq && !unk) {
                        any = true;
                        matched += row.polynomial;
                    } else if (eq && unk) {
                        unknown = true;
                    }
                }
                if (any) return {Tri::True, std::move(matched)};
                return {unknown ? Tri::Unknown : Tri::False, Polynomial::one()};
            }
            case ExprKind::Exists: {
                const AnnotatedTable& sub = subquery_result(*e.subquery, &frame);
                if (sub.rows.empty()) return {Tri::False, Polynomial::one()};
                Polynomial all;
                for (const auto& row : sub.rows) all += row.polynomial;
                return {Tri::True, std::move(all)};
            }
            default: {
                Cell c = scalar(e, frame);
                if (c.value.is_null()) return {Tri::Unknown, Polynomial::one()};
                if (c.value.type() != ValueType::Bool) throw EngineError("non-boolean value used as a predicate");
                return {tri(c.value.as_bool()), Polynomial::one()};
            }
        }
    }

    // -- blocks ---------------------------------------------------------------

    struct Produced {
        AnnotatedRow row;
        std::vector<Value> sort_keys;
    };

    static const sql::SelectItem* alias_item(const QueryAst& q, const Expr& e) {
        if (e.kind != ExprKind::Column || !e.column.qualifier.empty()) return nullptr;
        for (const auto& s : q.select_items)
            if (!s.alias.empty() && text::iequals(s.alias, e.column.name)) return &s;
        return nullptr;
    }

    std::vector<Value> order_keys(const QueryAst& q, const Frame& frame, const Row& selected) {
        std::vector<Value> keys;
        for (const auto& o : q.order_by) {
            if (const auto* item = alias_item(q, o.expr)) {
                keys.push_back(selected[static_cast<std::size_t>(item - q.select_items.data())]);
                continue;
            }
            keys.push_back(scalar(o.expr, frame).value);
        }
        return keys;
    }

    void prime(const Expr& e) {
        if (e.kind == ExprKind::InSubquery || e.kind == ExprKind::Exists) {
            auto corr = correlated_.find(e.subquery.get());
            if (corr == correlated_.end())
                corr = correlated_.emplace(e.subquery.get(), references_outside(*e.subquery, catalog_, nullptr, 0)).first;
            if (!corr->second) subquery_result(*e.subquery, nullptr);
        }
        for (const auto& a : e.args) prime(a);
    }

    AnnotatedTable eval_block(const QueryAst& q, const Frame* outer) {
        if (sql::block_has_negated_subquery(q))
            throw NegationUnsupported("negated subqueries (NOT IN / NOT EXISTS) are not supported");
        if (q.from.empty()) throw EngineError("query has no FROM clause");

        // Uncorrelated subqueries are evaluated up front so that their
        // contributing tuples are recorded even when short-circuiting or an
        // empty input would skip them.
        if (q.where) prime(*q.where);
        if (q.having) prime(*q.having);
        for (const auto& item : q.select_items) prime(item.expr);

        Relation rel = scan(q.from.front());
        for (std::size_t i = 1; i < q.from.size(); ++i) rel = product(std::move(rel), scan(q.from[i]));

        if (q.where) {
            std::vector<WorkRow> kept;
            for (auto& row : rel.rows) {
                Frame f{&rel, &row, nullptr, outer};
                PredResult p = predicate(*q.where, f);
                if (p.value != Tri::True) continue;
                if (!p.factor.is_one()) row.poly *= p.factor;
                kept.push_back(std::move(row));
            }
            rel.rows = std::move(kept);
        }

        AnnotatedTable out;
        bool has_star = false;
        for (const auto& item : q.select_items) {
            if (item.expr.kind == ExprKind::Star) {
                has_star = true;
                for (const auto& b : rel.columns) out.columns.push_back({b.name, ValueType::Null});
            } else {
                out.columns.push_back({sql::output_name(item), ValueType::Null});
            }
        }
        (void)has_star;

        std::vector<Produced> produced;
        if (sql::is_aggregate_block(q)) {
            std::vector<std::vector<const WorkRow*>> groups;
            if (q.group_by.empty()) {
                groups.emplace_back();
                for (const auto& r : rel.rows) groups.back().push_back(&r);
            } else {
                std::map<std::vector<Value>, std::size_t> index;
                for (const auto& r : rel.rows) {
                    Frame f{&rel, &r, nullptr, outer};
                    std::vector<Value> key;
                    for (const auto& g : q.group_by) key.push_back(scalar(g, f).value);
                    auto [it, inserted] = index.emplace(std::move(key), groups.size());
                    if (inserted) groups.emplace_back();
                    groups[it->second].push_back(&r);
                }
            }
            for (const auto& members : groups) {
                Frame f{&rel, members.empty() ? nullptr : members.front(), &members, outer};
                Polynomial poly;
                for (const WorkRow* m : members) poly += m->poly;
                if (q.having) {
                    PredResult p = predicate(*q.having, f);
                    if (p.value != Tri::True) continue;
                    if (!p.factor.is_one()) poly *= p.factor;
                }
                Produced pr;
                for (const auto& item : q.select_items) {
                    Cell c = scalar(item.expr, f);
                    pr.row.values.push_back(std::move(c.value));
                    pr.row.where.push_back(std::move(c.where));
                }
                pr.row.polynomial = std::move(poly);
                for (const WorkRow* m : members) pr.row.contributing.insert(m->lineage.begin(), m->lineage.end());
                pr.sort_keys = order_keys(q, f, pr.row.values);
                produced.push_back(std::move(pr));
            }
        } else {
            for (const auto& r : rel.rows) {
                Frame f{&rel, &r, nullptr, outer};
                Produced pr;
                for (const auto& item : q.select_items) {
                    if (item.expr.kind == ExprKind::Star) {
                        pr.row.values.insert(pr.row.values.end(), r.values.begin(), r.values.end());
                        pr.row.where.insert(pr.row.where.end(), r.where.begin(), r.where.end());
                        continue;
                    }
                    Cell c = scalar(item.expr, f);
                    pr.row.values.push_back(std::move(c.value));
                    pr.row.where.push_back(std::move(c.where));
                }
                pr.row.polynomial = r.poly;
                pr.row.contributing = r.poly.variables();
                pr.sort_keys = order_keys(q, f, pr.row.values);
                produced.push_back(std::move(pr));
            }
        }

        if (q.distinct) {
            std::vector<Produced> merged;
            std::map<Row, std::size_t> seen;
            for (auto& p : produced) {
                auto [it, inserted] = seen.emplace(p.row.values, merged.size());
                if (inserted) {
                    merged.push_back(std::move(p));
                    continue;
                }
                auto& into = merged[it->second].row;
                into.polynomial += p.row.polynomial;
                for (std::size_t i = 0; i < into.where.size(); ++i)
                    into.where[i].insert(p.row.where[i].begin(), p.row.where[i].end());
                into.contributing.insert(p.row.contributing.begin(), p.row.contributing.end());
            }
            produced = std::move(merged);
        }

        if (!q.order_by.empty()) {
            std::stable_sort(produced.begin(), produced.end(), [&](const Produced& a, const Produced& b) {
                for (std::size_t i = 0; i < q.order_by.size(); ++i) {
                    auto ord = sort_compare(a.sort_keys[i], b.sort_keys[i]);
                    if (ord == 0) continue;
                    return q.order_by[i].descending ? ord > 0 : ord < 0;
                }
                return a.row.contributing < b.row.contributing;
            });
        }
        if (q.limit && produced.size() > static_cast<std::size_t>(*q.limit))
            produced.resize(static_cast<std::size_t>(*q.limit));

        for (auto& p : produced) out.rows.push_back(std::move(p.row));
        for (std::size_t c = 0; c < out.columns.size(); ++c)
            for (const auto& r : out.rows)
                if (!r.values[c].is_null()) {
                    out.columns[c].type = r.values[c].type();
                    break;
                }
        return out;
    }

    const Catalog& catalog_;
    EvalOptions options_;
    TupleSet nested_;
    std::vector<std::string> warnings_;
    std::map<const QueryAst*, AnnotatedTable> cache_;
    std::map<const QueryAst*, bool> correlated_;
    std::deque<AnnotatedTable> scratch_;
};

}  // namespace engine_detail

/// Evaluates `ast` under bag semantics with N[X] provenance annotations.
inline AnnotatedTable eval(const sql::QueryAst& ast, const Catalog& catalog, const EvalOptions& options = {}) {
    return engine_detail::Evaluator(catalog, options).run(ast);
}

}  // namespace postview
