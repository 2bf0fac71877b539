#pragma once

#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "postview/bench/grader.hpp"
#include "postview/bench/qa.hpp"
#include "postview/bench/timeline.hpp"
#include "postview/engine.hpp"
#include "postview/nl2sql.hpp"
#include "postview/pipeline.hpp"
#include "postview/rbe.hpp"
#include "postview/verbalize.hpp"

namespace postview::bench {

enum class EngineKind { Vbe, Rbe, SqlBaseline, NoViews };

inline const char* to_string(EngineKind e) {
    switch (e) {
        case EngineKind::Vbe: return "VBE";
        case EngineKind::Rbe: return "RBE";
        case EngineKind::SqlBaseline: return "SQLBaseline";
        case EngineKind::NoViews: return "NoViews";
    }
    return "?";
}

inline std::optional<EngineKind> parse_engine(std::string_view s) {
    const std::string l = text::to_lower(s);
    if (l == "vbe") return EngineKind::Vbe;
    if (l == "rbe") return EngineKind::Rbe;
    if (l == "sqlbase" || l == "sqlbaseline") return EngineKind::SqlBaseline;
    if (l == "noviews") return EngineKind::NoViews;
    return std::nullopt;
}

struct EngineOutput {
    std::string text;
    bool failed = false;  // budget exceeded, translation failure or engine error
    std::string note;
};

// ---------------------------------------------------------------------------
// Baselines that leave aggregation to a reader working from the rendered
// rows, the way a language model reads a query result.

/// `[('2022/12/26', 'Avery'), ...]`
inline std::string render_rows(const AnnotatedTable& t) {
    std::string out = "[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += r ? ", (" : "(";
        const auto& vals = t.rows[r].values;
        for (std::size_t c = 0; c < vals.size(); ++c) out += (c ? ", " : "") + sql::detail::print_literal(vals[c]);
        out += vals.size() == 1 ? ",)" : ")";
    }
    return out + "]";
}

namespace runner_detail {

using K = QuestionCategory::Kind;

inline AnnotatedTable scalar_table(Value v) {
    AnnotatedTable t;
    t.columns.push_back({"value", v.type()});
    AnnotatedRow r;
    r.values.push_back(std::move(v));
    t.rows.push_back(std::move(r));
    return t;
}

/// Reader over rows of (date, value...) for the category. Works only from
/// the rows it was handed.
inline std::string read_rows(const AnnotatedTable& rows, const QuestionCategory& cat, std::size_t date_col,
                             std::size_t value_col) {
    switch (cat.kind) {
        case K::CountTimes:
        case K::NestedCompare:
        case K::DidEver:
            return verbalize(scalar_table(Value(static_cast<std::int64_t>(rows.rows.size()))), cat,
                             std::numeric_limits<std::size_t>::max());
        case K::LastTime:
        case K::FirstTime: {
            Value best;
            for (const auto& r : rows.rows) {
                const Value& v = r.values[date_col];
                if (v.is_null()) continue;
                if (best.is_null() || (cat.kind == K::LastTime ? sort_compare(v, best) > 0 : sort_compare(v, best) < 0))
                    best = v;
            }
            return verbalize(scalar_table(best), cat, std::numeric_limits<std::size_t>::max());
        }
        case K::SumSpent: {
            if (rows.rows.empty()) return verbalize(scalar_table(Value()), cat, std::numeric_limits<std::size_t>::max());
            double total = 0;
            for (const auto& r : rows.rows) {
                const Value& v = r.values[value_col];
                if (is_numeric(v.type())) total += v.numeric();
                else
                    for (double a : rbe_detail::amounts(v.to_string())) total += a;
            }
            return verbalize(scalar_table(Value(total)), cat, std::numeric_limits<std::size_t>::max());
        }
        case K::MostFrequent: {
            std::map<std::string, std::int64_t> counts;
            for (const auto& r : rows.rows) ++counts[r.values[value_col].to_string()];
            AnnotatedTable t;
            std::int64_t best = 0;
            std::string value;
            for (const auto& [v, c] : counts)
                if (c > best) {
                    best = c;
                    value = v;
                }
            if (best == 0) return "I found no matching records.";
            AnnotatedRow row;
            row.values = {Value(value), Value(best)};
            t.rows.push_back(std::move(row));
            return verbalize(t, cat, std::numeric_limits<std::size_t>::max());
        }
        case K::ListOn: {
            AnnotatedTable t;
            std::set<std::string> seen;
            for (const auto& r : rows.rows) {
                const std::string v = r.values[value_col].to_string();
                if (!seen.insert(v).second) continue;
                AnnotatedRow row;
                row.values = {Value(v)};
                t.rows.push_back(std::move(row));
            }
            return verbalize(t, cat, std::numeric_limits<std::size_t>::max());
        }
    }
    return {};
}

/// Template SQL with its aggregation removed: the full view rows an
/// aggregate would have consumed, as a reader-based chain would fetch them.
struct Unpushed {
    sql::QueryAst query;
    std::size_t date_col = 0;
    std::size_t value_col = 0;  // the aggregated or listed column
};

inline Unpushed unpush(sql::QueryAst q, const View& view) {
    std::string value = "date";
    for (const auto& s : q.select_items) {
        const sql::Expr* e = &s.expr;
        if (e->kind == sql::ExprKind::Agg) {
            if (e->args.empty() || e->args[0].kind != sql::ExprKind::Column) continue;
            e = &e->args[0];
        }
        if (e->kind == sql::ExprKind::Column && e->column.name != "date") {
            value = e->column.name;
            break;
        }
    }
    Unpushed u;
    const auto& cols = view.table.schema.columns;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        q.select_items.clear();
        if (cols[c].name == "date") u.date_col = c;
        if (cols[c].name == value) u.value_col = c;
    }
    for (const auto& c : cols) q.select_items.push_back({sql::col(c.name), ""});
    q.group_by.clear();
    q.having.reset();
    q.order_by.clear();
    q.limit.reset();
    q.distinct = false;
    u.query = std::move(q);
    return u;
}

inline std::string like_pattern(const std::string& v) { return "%" + v + "%"; }

/// LIKE-scan over the flat (date, description) view: every slot value must
/// occur in the description. No structure, no nesting.
inline sql::QueryAst flat_query(const std::map<std::string, std::string>& slots) {
    sql::QueryAst q;
    q.select_items = {{sql::col("date"), ""}, {sql::col("description"), ""}};
    q.from.push_back({"timeline", {}, ""});
    std::vector<sql::Expr> where;
    for (const auto& [k, v] : slots) {
        if (k == "year") {
            where.push_back(sql::cmp(sql::CompareOp::Ge, sql::col("date"), sql::lit(Value(v + "/01/01"))));
            where.push_back(sql::cmp(sql::CompareOp::Le, sql::col("date"), sql::lit(Value(v + "/12/31"))));
        } else if (k == "date") {
            auto d = Date::parse_long(v);
            where.push_back(sql::cmp(sql::CompareOp::Eq, sql::col("date"), sql::lit(Value(d ? d->to_string() : v))));
        } else {
            where.push_back(sql::like(sql::col("description"), like_pattern(v)));
        }
    }
    q.where = sql::conjoin(std::move(where));
    return q;
}

}  // namespace runner_detail

inline EngineOutput run_sql_baseline(const QaItem& item, const Catalog& views, std::size_t budget) {
    const View* view = views.find(item.view);
    if (!view) return {"", true, "missing view"};
    Translation tr;
    try {
        tr = translate_template(item.question, *view);
    } catch (const std::exception& e) {
        return {"", true, e.what()};
    }
    const auto u = runner_detail::unpush(sql::parse(tr.sql), *view);
    AnnotatedTable t;
    try {
        t = eval(u.query, views);
    } catch (const std::exception& e) {
        return {"", true, e.what()};
    }
    const std::string rendered = render_rows(t);
    if (rendered.size() > budget) return {"", true, "ContextBudgetExceeded: " + std::to_string(rendered.size())};
    return {runner_detail::read_rows(t, tr.category, u.date_col, u.value_col), false, {}};
}

inline EngineOutput run_no_views(const QaItem& item, const Catalog& flat, std::size_t budget) {
    auto m = classify(item.question);
    if (!m) return {"", true, "no template"};
    const Translation tr = instantiate(*m);
    AnnotatedTable t;
    try {
        t = eval(runner_detail::flat_query(m->slots), flat);
    } catch (const std::exception& e) {
        return {"", true, e.what()};
    }
    const std::string rendered = render_rows(t);
    if (rendered.size() > budget) return {"", true, "ContextBudgetExceeded: " + std::to_string(rendered.size())};
    return {runner_detail::read_rows(t, tr.category, 0, 1), false, {}};
}

struct BenchConfig {
    std::vector<EngineKind> engines{EngineKind::Vbe, EngineKind::Rbe, EngineKind::SqlBaseline, EngineKind::NoViews};
    std::vector<SizeClass> sizes{SizeClass::S, SizeClass::M, SizeClass::L};
    std::uint64_t seed = 7;
    double scale = 0.1;
    PipelineConfig pipeline;
};

struct QuestionResult {
    SizeClass size;
    EngineKind engine;
    QaItem item;
    std::string answer;
    Grade grade;
    bool failed = false;
    std::string note;
    std::optional<bool> reconciled;  // VBE with provenance
};

struct CellSummary {
    double mean = 0;
    std::size_t questions = 0;
    std::size_t failures = 0;
    double runtime_ms = 0;
};

struct Report {
    BenchConfig config;
    std::map<std::pair<SizeClass, EngineKind>, CellSummary> cells;
    std::vector<QuestionResult> results;

    double mean(SizeClass s, EngineKind e) const {
        auto it = cells.find({s, e});
        return it == cells.end() ? 0.0 : it->second.mean;
    }
};

inline Report run_benchmark(const BenchConfig& config) {
    Report report{config, {}, {}};
    for (SizeClass size : config.sizes) {
        const Timeline t = generate_timeline(size, config.seed, config.scale);
        const TimelineData data = build_views(t);
        const Index index = build_index(data.documents);
        const auto qa = generate_qa(t, config.seed);
        for (EngineKind engine : config.engines) {
            CellSummary cell;
            const auto start = std::chrono::steady_clock::now();
            double sum = 0;
            for (const auto& item : qa) {
                QuestionResult r{size, engine, item, {}, {}, false, {}, std::nullopt};
                switch (engine) {
                    case EngineKind::Vbe: {
                        const Answer a = ask(item.question, data.views, index, config.pipeline);
                        r.answer = a.text;
                        r.failed = !a.is_vbe() || a.context_budget_exceeded;
                        if (!a.is_vbe()) r.note = "fallback: " + a.route.reason;
                        if (a.context_budget_exceeded) r.note = "ContextBudgetExceeded";
                        if (a.provenance) r.reconciled = a.provenance->reconciliation.equal;
                        break;
                    }
                    case EngineKind::Rbe: r.answer = answer_rbe(index, item.question, config.pipeline.rbe).text; break;
                    case EngineKind::SqlBaseline: {
                        auto o = run_sql_baseline(item, data.views, config.pipeline.context_budget_chars);
                        r.answer = o.text;
                        r.failed = o.failed;
                        r.note = o.note;
                        break;
                    }
                    case EngineKind::NoViews: {
                        auto o = run_no_views(item, data.flat, config.pipeline.context_budget_chars);
                        r.answer = o.text;
                        r.failed = o.failed;
                        r.note = o.note;
                        break;
                    }
                }
                r.grade = r.failed && r.answer.empty() ? Grade{1, "failure"} : grade(r.answer, item.truth);
                sum += r.grade.value;
                cell.failures += r.failed;
                report.results.push_back(std::move(r));
            }
            cell.questions = qa.size();
            cell.mean = qa.empty() ? 0 : sum / static_cast<double>(qa.size());
            cell.runtime_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            report.cells[{size, engine}] = cell;
        }
    }
    return report;
}

inline std::string format_mean(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

/// size, engine, mean, questions, failures, runtime_ms
inline std::string report_tsv(const Report& r) {
    std::string out = "size\tengine\tmean_grade\tquestions\tfailures\truntime_ms\n";
    for (SizeClass s : r.config.sizes)
        for (EngineKind e : r.config.engines) {
            const auto& c = r.cells.at({s, e});
            char rt[32];
            std::snprintf(rt, sizeof rt, "%.1f", c.runtime_ms);
            out += std::string(to_string(s)) + "\t" + to_string(e) + "\t" + format_mean(c.mean) + "\t" +
                   std::to_string(c.questions) + "\t" + std::to_string(c.failures) + "\t" + rt + "\n";
        }
    return out;
}

/// Engines as rows, size classes as columns, mean grades in the cells.
inline std::string report_table(const Report& r) {
    std::string out = "Mean grade (1-5), seed " + std::to_string(r.config.seed) + ", scale " +
                      format_double(r.config.scale) + "\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s", "engine");
    out += buf;
    for (SizeClass s : r.config.sizes) {
        std::snprintf(buf, sizeof buf, "  %6s", to_string(s));
        out += buf;
    }
    out += "\n";
    for (EngineKind e : r.config.engines) {
        std::snprintf(buf, sizeof buf, "%-12s", to_string(e));
        out += buf;
        for (SizeClass s : r.config.sizes) {
            std::snprintf(buf, sizeof buf, "  %6s", format_mean(r.mean(s, e)).c_str());
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace postview::bench
