#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "postview/catalog.hpp"
#include "postview/category.hpp"
#include "postview/rewriter.hpp"
#include "postview/sql_parser.hpp"
#include "postview/sql_printer.hpp"

namespace postview {

class TranslationError : public Error {
public:
    using Error::Error;
};

/// No template accepts the question for the chosen view.
class NoTemplateMatch : public TranslationError {
public:
    using TranslationError::TranslationError;
};

struct Translation {
    enum class Translator { Template, Remote };

    std::string sql;
    QuestionCategory category;
    std::map<std::string, std::string> slots;
    Translator translator = Translator::Template;
    std::vector<std::string> audit;
};

inline const char* to_string(Translation::Translator t) {
    return t == Translation::Translator::Template ? "template" : "remote";
}

/// One question shape: surface form with {slot} placeholders, the view it
/// targets, the SQL it becomes and the phrase used in the answer. The
/// benchmark generates its questions from the same table.
struct QuestionGrammar {
    QuestionCategory::Kind kind;
    std::string format;
    std::string view;
    std::string sql;
    std::string phrase;
};

inline const std::vector<QuestionGrammar>& question_grammars() {
    using K = QuestionCategory::Kind;
    static const std::vector<QuestionGrammar> grammars = {
        // Nested forms first: their prefixes overlap with the simple counts.
        {K::NestedCompare, "How many times did I chat with {person} on days I went {activity}?", "daily_chat_log",
         "SELECT COUNT(*) FROM daily_chat_log WHERE friends LIKE '%{person}%' AND date IN "
         "(SELECT date FROM exercise_log WHERE activity LIKE '%{activity}%')",
         "chatted with {person} on days I went {activity}"},
        {K::NestedCompare, "How many times did I chat with {person} on days I shopped at {store}?", "daily_chat_log",
         "SELECT COUNT(*) FROM daily_chat_log WHERE friends LIKE '%{person}%' AND date IN "
         "(SELECT date FROM purchases WHERE store LIKE '%{store}%')",
         "chatted with {person} on days I shopped at {store}"},

        {K::CountTimes, "How many times did I chat with {person}?", "daily_chat_log",
         "SELECT COUNT(*) FROM daily_chat_log WHERE friends LIKE '%{person}%'", "chatted with {person}"},
        {K::CountTimes, "How many times did I go {activity} in {year}?", "exercise_log",
         "SELECT COUNT(*) FROM exercise_log WHERE activity LIKE '%{activity}%' AND date >= '{year}/01/01' AND "
         "date <= '{year}/12/31'",
         "went {activity} in {year}"},
        {K::CountTimes, "How many times did I travel to {destination}?", "trips",
         "SELECT COUNT(*) FROM trips WHERE destination LIKE '%{destination}%'", "traveled to {destination}"},
        {K::CountTimes, "How many times did I buy {item}?", "purchases",
         "SELECT COUNT(*) FROM purchases WHERE item LIKE '%{item}%'", "bought {item}"},
        {K::CountTimes, "How many times did I take {pet} to the vet?", "pet_care",
         "SELECT COUNT(*) FROM pet_care WHERE pet LIKE '%{pet}%' AND activity LIKE '%vet%'",
         "took {pet} to the vet"},

        {K::LastTime, "When was the last time I chatted with {person}?", "daily_chat_log",
         "SELECT MAX(date) FROM daily_chat_log WHERE friends LIKE '%{person}%'", "chatted with {person}"},
        {K::LastTime, "When was the last time I went {activity}?", "exercise_log",
         "SELECT MAX(date) FROM exercise_log WHERE activity LIKE '%{activity}%'", "went {activity}"},
        {K::LastTime, "When was the last time I traveled to {destination}?", "trips",
         "SELECT MAX(date) FROM trips WHERE destination LIKE '%{destination}%'", "traveled to {destination}"},
        {K::LastTime, "When was the last time I groomed {pet}?", "pet_care",
         "SELECT MAX(date) FROM pet_care WHERE pet LIKE '%{pet}%' AND activity LIKE '%grooming%'",
         "groomed {pet}"},

        {K::FirstTime, "When was the first time I chatted with {person}?", "daily_chat_log",
         "SELECT MIN(date) FROM daily_chat_log WHERE friends LIKE '%{person}%'", "chatted with {person}"},
        {K::FirstTime, "When was the first time I bought {item}?", "purchases",
         "SELECT MIN(date) FROM purchases WHERE item LIKE '%{item}%'", "bought {item}"},
        {K::FirstTime, "When was the first time I traveled to {destination}?", "trips",
         "SELECT MIN(date) FROM trips WHERE destination LIKE '%{destination}%'", "traveled to {destination}"},

        {K::ListOn, "Who did I chat with on {date}?", "daily_chat_log",
         "SELECT DISTINCT friends FROM daily_chat_log WHERE date = '{date}'", "chatted with on {date}"},
        {K::ListOn, "What did I buy on {date}?", "purchases",
         "SELECT DISTINCT item FROM purchases WHERE date = '{date}'", "bought on {date}"},
        {K::ListOn, "What exercise did I do on {date}?", "exercise_log",
         "SELECT DISTINCT activity FROM exercise_log WHERE date = '{date}'", "did as exercise on {date}"},

        {K::MostFrequent, "Which store did I shop at most often?", "purchases",
         "SELECT store, COUNT(*) FROM purchases GROUP BY store ORDER BY COUNT(*) DESC LIMIT 1",
         "store I shopped at"},
        {K::MostFrequent, "Which place did I travel to most often?", "trips",
         "SELECT destination, COUNT(*) FROM trips GROUP BY destination ORDER BY COUNT(*) DESC LIMIT 1",
         "place I traveled to"},
        {K::MostFrequent, "Which exercise activity did I do most often?", "exercise_log",
         "SELECT activity, COUNT(*) FROM exercise_log GROUP BY activity ORDER BY COUNT(*) DESC LIMIT 1",
         "exercise activity I did"},
        {K::MostFrequent, "What topic did I chat about most often?", "daily_chat_log",
         "SELECT topic, COUNT(*) FROM daily_chat_log GROUP BY topic ORDER BY COUNT(*) DESC LIMIT 1",
         "topic I chatted about"},

        {K::DidEver, "Did I ever travel to {destination}?", "trips",
         "SELECT COUNT(*) FROM trips WHERE destination LIKE '%{destination}%'", "traveled to {destination}"},
        {K::DidEver, "Did I ever buy {item}?", "purchases",
         "SELECT COUNT(*) FROM purchases WHERE item LIKE '%{item}%'", "bought {item}"},
        {K::DidEver, "Did I ever go {activity} with {person}?", "exercise_log",
         "SELECT COUNT(*) FROM exercise_log WHERE activity LIKE '%{activity}%' AND companion LIKE '%{person}%'",
         "went {activity} with {person}"},

        {K::SumSpent, "How much did I spend on {item} in {year}?", "purchases",
         "SELECT SUM(price) FROM purchases WHERE item LIKE '%{item}%' AND date >= '{year}/01/01' AND "
         "date <= '{year}/12/31'",
         "on {item} in {year}"},
        {K::SumSpent, "How much did I spend at {store} in {year}?", "purchases",
         "SELECT SUM(price) FROM purchases WHERE store LIKE '%{store}%' AND date >= '{year}/01/01' AND "
         "date <= '{year}/12/31'",
         "at {store} in {year}"},
    };
    return grammars;
}

namespace nl2sql_detail {

inline std::string slot_pattern(const std::string& slot) {
    if (slot == "year") return "(\\d{4})";
    if (slot == "date") return "([A-Za-z]+ \\d{1,2}, \\d{4}|\\d{4}[/-]\\d{1,2}[/-]\\d{1,2})";
    return "([A-Za-z][A-Za-z'-]*)";
}

inline std::string strip_question(std::string s) {
    s = text::trim(s);
    while (!s.empty() && (s.back() == '?' || s.back() == '.' || s.back() == '!')) s.pop_back();
    return text::trim(s);
}

struct CompiledGrammar {
    const QuestionGrammar* grammar;
    std::regex pattern;
    std::vector<std::string> slots;
};

inline CompiledGrammar compile(const QuestionGrammar& g) {
    static const std::string special = "\\^$.|?*+()[]{}";
    const std::string format = strip_question(g.format);
    CompiledGrammar out{&g, {}, {}};
    std::string re;
    for (std::size_t i = 0; i < format.size(); ++i) {
        if (format[i] == '{') {
            const std::size_t close = format.find('}', i);
            const std::string slot = format.substr(i + 1, close - i - 1);
            out.slots.push_back(slot);
            re += slot_pattern(slot);
            i = close;
            continue;
        }
        if (format[i] == ' ') {
            re += "\\s+";
            continue;
        }
        if (special.find(format[i]) != std::string::npos) re += '\\';
        re += format[i];
    }
    out.pattern = std::regex(re, std::regex::icase | std::regex::ECMAScript);
    return out;
}

inline const std::vector<CompiledGrammar>& compiled() {
    static const std::vector<CompiledGrammar> all = [] {
        std::vector<CompiledGrammar> v;
        for (const auto& g : question_grammars()) v.push_back(compile(g));
        return v;
    }();
    return all;
}

inline std::string fill(const std::string& tmpl, const std::map<std::string, std::string>& slots) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '{') {
            const std::size_t close = tmpl.find('}', i);
            if (close != std::string::npos) {
                auto it = slots.find(tmpl.substr(i + 1, close - i - 1));
                if (it != slots.end()) {
                    out += it->second;
                    i = close;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i]);
    }
    return out;
}

// SQL literal form of a slot value.
inline std::string sql_slot(const std::string& slot, const std::string& value) {
    if (slot == "date") {
        if (auto d = Date::parse(value)) return d->to_string();
        if (auto d = Date::parse_long(value)) return d->to_string();
    }
    std::string out;
    for (char c : value) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    return out;
}

}  // namespace nl2sql_detail

struct GrammarMatch {
    const QuestionGrammar* grammar = nullptr;
    std::map<std::string, std::string> slots;  // as written in the question
};

/// All grammars whose surface form accepts the question, in table order.
inline std::vector<GrammarMatch> classify_all(const std::string& question) {
    std::vector<GrammarMatch> out;
    const std::string q = nl2sql_detail::strip_question(question);
    for (const auto& cg : nl2sql_detail::compiled()) {
        std::smatch m;
        if (!std::regex_match(q, m, cg.pattern)) continue;
        GrammarMatch gm{cg.grammar, {}};
        for (std::size_t i = 0; i < cg.slots.size(); ++i) gm.slots[cg.slots[i]] = m[i + 1].str();
        out.push_back(std::move(gm));
    }
    return out;
}

inline std::optional<GrammarMatch> classify(const std::string& question) {
    auto all = classify_all(question);
    if (all.empty()) return std::nullopt;
    return all.front();
}

/// Fills `grammar` with slot values: the question text it produces and the
/// translation it must yield.
inline std::string render_question(const QuestionGrammar& grammar, const std::map<std::string, std::string>& slots) {
    return nl2sql_detail::fill(grammar.format, slots);
}

inline Translation instantiate(const GrammarMatch& match) {
    std::map<std::string, std::string> sql_slots;
    for (const auto& [k, v] : match.slots) sql_slots[k] = nl2sql_detail::sql_slot(k, v);
    Translation t;
    t.sql = nl2sql_detail::fill(match.grammar->sql, sql_slots);
    t.category.kind = match.grammar->kind;
    std::map<std::string, std::string> phrase_slots = match.slots;
    if (auto it = match.slots.find("date"); it != match.slots.end()) {
        auto d = Date::parse(it->second);
        if (!d) d = Date::parse_long(it->second);
        if (d) {
            t.category.date = *d;
            phrase_slots["date"] = d->long_form();
        }
    }
    t.category.phrase = nl2sql_detail::fill(match.grammar->phrase, phrase_slots);
    t.slots = match.slots;
    t.translator = Translation::Translator::Template;
    return t;
}

/// Closed-world template translation for questions about `view`.
inline Translation translate_template(const std::string& question, const View& view) {
    for (auto& m : classify_all(question))
        if (text::iequals(m.grammar->view, view.name)) return instantiate(m);
    throw NoTemplateMatch("no template matches \"" + question + "\" for view '" + view.name + "'");
}

/// True iff the outermost select list computes an aggregate.
inline bool aggregate_pushdown_check(const Translation& translation) {
    sql::QueryAst ast;
    try {
        ast = sql::parse(translation.sql);
    } catch (const sql::SqlError&) {
        return false;
    }
    for (const auto& s : ast.select_items)
        if (sql::contains_aggregate(s.expr)) return true;
    return false;
}

/// Category implied by a query's shape.
inline QuestionCategory::Kind category_from_shape(const sql::QueryAst& ast) {
    using K = QuestionCategory::Kind;
    bool nested = false;
    std::function<void(const sql::Expr&)> scan = [&](const sql::Expr& e) {
        if (e.kind == sql::ExprKind::InSubquery || e.kind == sql::ExprKind::Exists) nested = true;
        for (const auto& a : e.args) scan(a);
    };
    if (ast.where) scan(*ast.where);
    if (!ast.group_by.empty() && ast.limit) return K::MostFrequent;
    if (ast.select_items.size() == 1 && ast.select_items[0].expr.kind == sql::ExprKind::Agg) {
        switch (ast.select_items[0].expr.agg) {
            case sql::AggFn::Max: return K::LastTime;
            case sql::AggFn::Min: return K::FirstTime;
            case sql::AggFn::Sum: return K::SumSpent;
            default: return nested ? K::NestedCompare : K::CountTimes;
        }
    }
    return K::ListOn;
}

// ---------------------------------------------------------------------------
// Remote translation over a minimal JSON protocol.

struct RemoteConfig {
    std::string url;  // e.g. http://localhost:8080/translate
    double timeout_s = 30.0;
    std::string key_env = "POSTVIEW_TRANSLATOR_KEY";
};

inline nlohmann::json translation_request(const std::string& question, const View& view) {
    nlohmann::json columns = nlohmann::json::array();
    for (const auto& c : view.table.schema.columns) columns.push_back({{"name", c.name}, {"type", type_name(c.type)}});
    return {{"question", question},
            {"view", {{"name", view.name}, {"description", view.description}, {"columns", columns}}},
            {"dialect", "posttext-subset-v1"}};
}

namespace nl2sql_detail {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

inline Endpoint split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', start);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace nl2sql_detail

/// Sends the question and view schema to a translation endpoint. The reply
/// must be `{"sql": ...}`; unparsable SQL is retried once. The accepted SQL
/// must survive clean().
inline Translation translate_remote(const std::string& question, const View& view, const Catalog& catalog,
                                    const RemoteConfig& config) {
    const char* key = std::getenv(config.key_env.c_str());
    if (!key || !*key) throw TranslationError("credentials missing: set " + config.key_env);
    if (config.url.empty()) throw TranslationError("no translator URL configured");

    const auto endpoint = nl2sql_detail::split_url(config.url);
    httplib::Client client(endpoint.base);
    const auto secs = static_cast<time_t>(config.timeout_s);
    const auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
    const std::string body = translation_request(question, view).dump();

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto res = client.Post(endpoint.path, headers, body, "application/json");
        if (!res) throw TranslationError("translator transport error: " + httplib::to_string(res.error()));
        if (res->status != 200) throw TranslationError("translator returned HTTP " + std::to_string(res->status));
        std::string sql_text;
        try {
            auto j = nlohmann::json::parse(res->body);
            sql_text = j.at("sql").get<std::string>();
        } catch (const std::exception& e) {
            throw TranslationError(std::string("malformed translator response: ") + e.what());
        }
        sql::QueryAst ast;
        try {
            ast = sql::parse(sql_text);
        } catch (const sql::SqlError& e) {
            last_error = e.what();
            continue;
        }
        Rewrite cleaned = clean(ast, catalog);

        Translation t;
        t.sql = sql_text;
        t.translator = Translation::Translator::Remote;
        t.audit = cleaned.audit;
        const auto shape = category_from_shape(cleaned.ast);
        if (auto m = classify(question); m && m->grammar->kind == shape) {
            Translation tmpl = instantiate(*m);
            t.category = tmpl.category;
            t.slots = tmpl.slots;
        } else {
            t.category.kind = shape;
            t.category.phrase = "did that";
        }
        return t;
    }
    throw TranslationError("translator returned unparsable SQL twice: " + last_error);
}

}  // namespace postview
