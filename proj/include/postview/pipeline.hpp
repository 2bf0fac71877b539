#pragma once

#include <optional>
#include <string>
#include <vector>

#include "postview/catalog.hpp"
#include "postview/engine.hpp"
#include "postview/nl2sql.hpp"
#include "postview/provgen.hpp"
#include "postview/rbe.hpp"
#include "postview/rewriter.hpp"
#include "postview/router.hpp"
#include "postview/sql_parser.hpp"
#include "postview/sql_printer.hpp"
#include "postview/verbalize.hpp"

namespace postview {

struct PipelineConfig {
    double route_threshold = kDefaultRouteThreshold;
    Translation::Translator translator = Translation::Translator::Template;
    RemoteConfig remote;
    RelaxConfig relax;
    RbeConfig rbe;
    std::size_t context_budget_chars = kDefaultContextBudget;
    bool provenance = false;
};

struct AuditEvent {
    std::string stage;  // route, translate, clean, relax, eval, verbalize, provenance, fallback, rbe
    std::string message;
};

struct SqlStages {
    std::string raw;
    std::string cleaned;
    std::string relaxed;
};

struct ProvenanceBundle {
    std::vector<ProvQuery> queries;
    std::vector<ProvTuple> tuples;
    ReconciliationReport reconciliation;
    bool partial = false;
};

struct Answer {
    std::string question;
    std::string text;
    RouteDecision route;
    std::optional<QuestionCategory> category;
    std::optional<Translation::Translator> translator;
    std::optional<AnnotatedTable> result_table;
    std::optional<SqlStages> sql;
    std::optional<ProvenanceBundle> provenance;
    std::optional<std::vector<Hit>> sources;
    bool context_budget_exceeded = false;
    std::vector<AuditEvent> audit;

    bool is_vbe() const { return result_table.has_value(); }
};

inline constexpr const char* kTruncationNotice = " [truncated: context budget exceeded]";

/// Cuts `text` to at most `budget` characters including the notice.
inline std::string truncate_to_budget(const std::string& text, std::size_t budget) {
    const std::string notice = kTruncationNotice;
    if (text.size() <= budget) return text;
    if (budget <= notice.size()) return notice.substr(0, budget);
    return text.substr(0, budget - notice.size()) + notice;
}

namespace pipeline_detail {

inline void rbe_fallback(Answer& a, const Index& index, const PipelineConfig& config, const std::string& reason) {
    a.route = RouteDecision::rbe(reason);
    a.result_table.reset();
    a.provenance.reset();
    a.context_budget_exceeded = false;
    RbeAnswer r = answer_rbe(index, a.question, config.rbe);
    a.text = std::move(r.text);
    a.audit.push_back({"rbe", "retrieved " + std::to_string(r.sources.size()) + " document(s)"});
    a.sources = std::move(r.sources);
}

inline ProvenanceBundle provenance_for(const sql::QueryAst& relaxed, const AnnotatedTable& table,
                                       const Catalog& catalog, const EvalOptions& options) {
    ProvenanceBundle b;
    ProvGeneration gen = generate(relaxed, catalog);
    b.queries = gen.queries;
    b.tuples = execute_prov(catalog, gen.queries, options);
    b.reconciliation = reconcile(table, gen, b.tuples);
    b.partial = b.reconciliation.partial;
    return b;
}

}  // namespace pipeline_detail

/// route, translate, clean, relax, eval, verbalize, provenance. Never throws
/// for a well-formed catalog: failures fall back to retrieval and are
/// recorded in the audit.
inline Answer ask(const std::string& question, const Catalog& catalog, const Index& index,
                  const PipelineConfig& config = {}) {
    Answer a;
    a.question = question;
    a.route = route(question, catalog, config.route_threshold);
    if (!a.route.is_vbe()) {
        a.audit.push_back({"route", std::string("RBE: ") + a.route.reason});
        pipeline_detail::rbe_fallback(a, index, config, a.route.reason);
        return a;
    }
    a.audit.push_back({"route", "VBE: view " + a.route.view + " (confidence " + format_double(a.route.confidence) + ")"});
    const View& view = catalog.get(a.route.view);

    Translation tr;
    sql::QueryAst raw;
    try {
        tr = config.translator == Translation::Translator::Remote
                 ? translate_remote(question, view, catalog, config.remote)
                 : translate_template(question, view);
        raw = sql::parse(tr.sql);
    } catch (const std::exception& e) {
        a.audit.push_back({"translate", std::string("failed: ") + e.what()});
        a.audit.push_back({"fallback", kTranslatorFailure});
        pipeline_detail::rbe_fallback(a, index, config, kTranslatorFailure);
        return a;
    }
    a.audit.push_back({"translate", std::string(to_string(tr.translator)) + ": " + tr.sql});
    a.category = tr.category;
    a.translator = tr.translator;

    Rewrite cleaned, relaxed;
    try {
        cleaned = clean(raw, catalog, config.relax);
    } catch (const std::exception& e) {
        a.audit.push_back({"clean", std::string("failed: ") + e.what()});
        a.audit.push_back({"fallback", kTranslatorFailure});
        pipeline_detail::rbe_fallback(a, index, config, kTranslatorFailure);
        return a;
    }
    if (cleaned.audit.empty()) a.audit.push_back({"clean", "no cleaning required"});
    for (auto& m : cleaned.audit) a.audit.push_back({"clean", m});

    relaxed = relax(cleaned.ast, catalog, config.relax);
    if (relaxed.audit.empty()) a.audit.push_back({"relax", "nothing to relax"});
    for (auto& m : relaxed.audit) a.audit.push_back({"relax", m});
    a.sql = SqlStages{sql::print(raw), sql::print(cleaned.ast), sql::print(relaxed.ast)};

    const EvalOptions options{config.relax.similarity_threshold};
    try {
        a.result_table = eval(relaxed.ast, catalog, options);
    } catch (const std::exception& e) {
        a.audit.push_back({"eval", std::string("failed: ") + e.what()});
        a.audit.push_back({"fallback", kEngineErrorFallback});
        pipeline_detail::rbe_fallback(a, index, config, kEngineErrorFallback);
        return a;
    }
    a.audit.push_back({"eval", std::to_string(a.result_table->rows.size()) + " row(s)"});
    for (const auto& w : a.result_table->warnings) a.audit.push_back({"eval", "warning: " + w});

    try {
        a.text = verbalize(*a.result_table, tr.category, config.context_budget_chars);
        a.audit.push_back({"verbalize", "ok"});
    } catch (const ContextBudgetExceeded& e) {
        a.context_budget_exceeded = true;
        a.text = truncate_to_budget(e.text(), config.context_budget_chars);
        a.audit.push_back({"verbalize", std::string("ContextBudgetExceeded: ") + e.what()});
    }

    if (config.provenance) {
        try {
            a.provenance = pipeline_detail::provenance_for(relaxed.ast, *a.result_table, catalog, options);
            a.audit.push_back({"provenance", std::to_string(a.provenance->queries.size()) + " quer" +
                                                 (a.provenance->queries.size() == 1 ? "y" : "ies") + ", " +
                                                 std::to_string(a.provenance->tuples.size()) + " tuple(s), " +
                                                 a.provenance->reconciliation.verdict()});
        } catch (const std::exception& e) {
            ProvenanceBundle b;
            b.partial = true;
            b.reconciliation.partial = true;
            b.reconciliation.notes.push_back(e.what());
            a.provenance = std::move(b);
            a.audit.push_back({"provenance", std::string("failed: ") + e.what()});
        }
    } else {
        a.audit.push_back({"provenance", "not requested"});
    }
    return a;
}

/// `[('q0', ('e152',)), ('q0', ('e154',))]`
inline std::string prov_listing(const std::vector<ProvTuple>& tuples) {
    std::string out = "[";
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        out += (i ? ", ('" : "('") + tuples[i].label + "', (";
        const auto& key = tuples[i].tuple.key;
        for (std::size_t k = 0; k < key.size(); ++k) out += (k ? ", " : "") + sql::detail::print_literal(key[k]);
        out += key.size() == 1 ? ",))" : "))";
    }
    return out + "]";
}

/// Narrative of how the question led to the answer.
inline std::string explain(const Answer& a, const Catalog& catalog, const Index* index = nullptr) {
    std::string out = "Question: " + a.question + "\n";
    if (!a.route.is_vbe() || !a.result_table) {
        out += "Route: retrieval-based engine (" + a.route.reason + ")\n";
        out += "Answer: " + a.text + "\n";
        if (a.sources && !a.sources->empty()) {
            out += "Retrieved documents:\n";
            for (const auto& h : *a.sources) {
                out += "  " + h.doc_id + "  score " + format_double(h.score);
                if (index)
                    if (const Document* d = index->find(h.doc_id)) out += "  " + d->text;
                out += "\n";
            }
        } else {
            out += "No documents were retrieved.\n";
        }
        return out;
    }
    out += "Route: view " + a.route.view + " (confidence " + format_double(a.route.confidence) + ")\n";
    if (a.sql) {
        out += "Translated query: " + a.sql->raw + "\n";
        out += "Cleaned query:    " + a.sql->cleaned + "\n";
        out += "Relaxed query:    " + a.sql->relaxed + "\n";
    }
    out += "Result: [";
    for (std::size_t r = 0; r < a.result_table->rows.size(); ++r) {
        out += r ? ", (" : "(";
        const auto& vals = a.result_table->rows[r].values;
        for (std::size_t c = 0; c < vals.size(); ++c) out += (c ? ", " : "") + sql::detail::print_literal(vals[c]);
        out += vals.size() == 1 ? ",)" : ")";
    }
    out += "]\n";
    out += "Answer: " + a.text + "\n";
    if (!a.provenance) return out + "Provenance: not requested\n";

    const auto& p = *a.provenance;
    out += "Provenance queries:\n";
    for (const auto& q : p.queries) out += "  " + q.label + ": " + sql::print(q.query) + "\n";
    out += "Contributing tuples:\n";
    for (const auto& t : p.tuples) {
        out += "  " + t.label + "  " + t.tuple.to_string();
        try {
            const Row& row = catalog.resolve(t.tuple);
            const auto& schema = catalog.get(t.tuple.view).table.schema;
            out += "  {";
            for (std::size_t c = 0; c < row.size(); ++c)
                out += (c ? ", " : "") + schema.columns[c].name + ": " + row[c].to_string();
            out += "}";
        } catch (const CatalogError& e) {
            out += std::string("  <") + e.what() + ">";
        }
        out += "\n";
    }
    out += "Provenance: " + prov_listing(p.tuples) + "\n";
    out += "Reconciliation: " + p.reconciliation.verdict() + "\n";
    for (const auto& n : p.reconciliation.notes) out += "  note: " + n + "\n";
    return out;
}

}  // namespace postview
