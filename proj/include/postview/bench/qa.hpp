#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "postview/bench/timeline.hpp"
#include "postview/category.hpp"
#include "postview/nl2sql.hpp"

namespace postview::bench {

struct QaItem {
    std::string question;
    std::string truth;
    QuestionCategory::Kind category;
    std::string view;
    std::map<std::string, std::string> slots;
};

inline nlohmann::json to_json(const QaItem& q) {
    return {{"question", q.question}, {"truth", q.truth}, {"category", to_string(q.category)}, {"view", q.view}};
}

namespace qa_detail {

using Slots = std::map<std::string, std::string>;

inline bool has_person(const Episode& e, const std::string& p) {
    return std::find(e.people.begin(), e.people.end(), p) != e.people.end();
}

inline bool in_year(const Episode& e, const Slots& s) {
    auto it = s.find("year");
    return it == s.end() || std::to_string(e.date.year) == it->second;
}

// Episodes a grammar's question is about, found by scanning the timeline.
// Keyed by the grammar's SQL so each template has exactly one oracle.
inline std::vector<const Episode*> select(const Timeline& t, const QuestionGrammar& g, const Slots& s) {
    auto get = [&](const char* k) {
        auto it = s.find(k);
        return it == s.end() ? std::string() : it->second;
    };
    std::vector<const Episode*> out;
    const std::string view = g.view;
    std::set<Date> exercise_days, shop_days;
    if (g.kind == QuestionCategory::Kind::NestedCompare) {
        for (const auto& e : t.episodes) {
            if (e.activity == Activity::Exercise && e.a == get("activity")) exercise_days.insert(e.date);
            if (e.activity == Activity::Purchase && e.b == get("store")) shop_days.insert(e.date);
        }
    }
    const bool on_shop_days = g.sql.find("FROM purchases WHERE store") != std::string::npos &&
                              g.kind == QuestionCategory::Kind::NestedCompare;
    for (const auto& e : t.episodes) {
        bool ok = false;
        if (view == "daily_chat_log" && e.activity == Activity::Chat) {
            ok = true;
            if (s.count("person")) ok = has_person(e, get("person"));
            if (g.kind == QuestionCategory::Kind::NestedCompare)
                ok = ok && (on_shop_days ? shop_days.count(e.date) > 0 : exercise_days.count(e.date) > 0);
        } else if (view == "trips" && e.activity == Activity::Trip) {
            ok = !s.count("destination") || e.a == get("destination");
        } else if (view == "purchases" && e.activity == Activity::Purchase) {
            ok = (!s.count("item") || e.a == get("item")) && (!s.count("store") || e.b == get("store"));
        } else if (view == "exercise_log" && e.activity == Activity::Exercise) {
            ok = (!s.count("activity") || e.a == get("activity")) && (!s.count("person") || e.b == get("person"));
        } else if (view == "pet_care" && e.activity == Activity::Pet) {
            const std::string wanted = g.sql.find("'%vet%'") != std::string::npos ? "vet" : "grooming";
            ok = e.a == get("pet") && e.b == wanted;
        }
        if (ok && !in_year(e, s)) ok = false;
        if (ok && s.count("date")) ok = Date::parse_long(get("date")) == e.date;
        if (ok) out.push_back(&e);
    }
    return out;
}

// The attribute a MostFrequent / ListOn question asks for.
inline std::string asked_value(const QuestionGrammar& g, const Episode& e) {
    if (g.sql.find("SELECT store") != std::string::npos) return e.b;
    if (g.sql.find("DISTINCT friends") != std::string::npos) return join_people(e.people);
    if (g.sql.find("SELECT topic") != std::string::npos) return e.a;
    return e.a;  // destination, item, exercise activity
}

inline std::optional<std::string> truth(const QuestionGrammar& g, const std::vector<const Episode*>& eps) {
    using K = QuestionCategory::Kind;
    switch (g.kind) {
        case K::CountTimes:
        case K::NestedCompare: return std::to_string(eps.size());
        case K::DidEver: return eps.empty() ? "no" : "yes";
        case K::LastTime:
        case K::FirstTime: {
            if (eps.empty()) return "never";
            Date best = eps.front()->date;
            for (const Episode* e : eps) best = g.kind == K::LastTime ? std::max(best, e->date) : std::min(best, e->date);
            return best.to_string();
        }
        case K::SumSpent: {
            double total = 0;
            for (const Episode* e : eps) total += e->price;
            return money(total);
        }
        case K::ListOn: {
            std::set<std::string> values;
            for (const Episode* e : eps) values.insert(asked_value(g, *e));
            std::string out;
            for (const auto& v : values) out += (out.empty() ? "" : ", ") + v;
            return out.empty() ? std::optional<std::string>() : out;
        }
        case K::MostFrequent: {
            std::map<std::string, std::size_t> counts;
            for (const Episode* e : eps) ++counts[asked_value(g, *e)];
            std::size_t best = 0, ties = 0;
            std::string value;
            for (const auto& [v, c] : counts) {
                if (c > best) {
                    best = c;
                    value = v;
                    ties = 1;
                } else if (c == best) {
                    ++ties;
                }
            }
            if (best == 0 || ties > 1) return std::nullopt;
            return value;
        }
    }
    return std::nullopt;
}

inline std::vector<std::string> slot_names(const QuestionGrammar& g) {
    std::vector<std::string> out;
    for (std::size_t i = g.format.find('{'); i != std::string::npos; i = g.format.find('{', i + 1))
        out.push_back(g.format.substr(i + 1, g.format.find('}', i) - i - 1));
    return out;
}

inline Activity activity_of_view(const std::string& view) {
    if (view == "daily_chat_log") return Activity::Chat;
    if (view == "trips") return Activity::Trip;
    if (view == "purchases") return Activity::Purchase;
    if (view == "exercise_log") return Activity::Exercise;
    return Activity::Pet;
}

inline const Episode* random_episode(Rng& rng, const Timeline& t, Activity a, const std::string& pet_activity = {}) {
    std::vector<const Episode*> pool;
    for (const auto& e : t.episodes)
        if (e.activity == a && (pet_activity.empty() || e.b == pet_activity)) pool.push_back(&e);
    return pool.empty() ? nullptr : rng.pick(pool);
}

// Slot values come from an episode of the question's view (the anchor), so
// questions ask about things that happened, in proportion to how often.
// Slots the anchor cannot supply come from a random episode of their kind.
inline Slots draw_slots(Rng& rng, const QuestionGrammar& g, const Timeline& t, bool unvisited) {
    const auto& lex = lexicon();
    const Activity own = activity_of_view(g.view);
    const std::string pet_activity =
        own == Activity::Pet ? (g.sql.find("'%vet%'") != std::string::npos ? "vet" : "grooming") : "";
    const Episode* anchor = random_episode(rng, t, own, pet_activity);
    auto from = [&](Activity a) { return a == own ? anchor : random_episode(rng, t, a); };
    Slots s;
    for (const auto& slot : slot_names(g)) {
        std::string v;
        if (slot == "person") {
            const Episode* e = from(own == Activity::Exercise ? Activity::Exercise : Activity::Chat);
            if (e) v = e->activity == Activity::Exercise ? e->b : rng.pick(e->people);
            else v = rng.pick(lex.people);
        } else if (slot == "activity") {
            const Episode* e = from(Activity::Exercise);
            v = e ? e->a : rng.pick(lex.exercises);
        } else if (slot == "destination") {
            const Episode* e = from(Activity::Trip);
            v = unvisited ? lex.unvisited_destination : e ? e->a : rng.pick(lex.destinations);
        } else if (slot == "item") {
            const Episode* e = from(Activity::Purchase);
            v = e ? e->a : rng.pick(lex.items);
        } else if (slot == "store") {
            const Episode* e = from(Activity::Purchase);
            v = e ? e->b : rng.pick(lex.stores);
        } else if (slot == "pet") {
            const Episode* e = from(Activity::Pet);
            v = e ? e->a : rng.pick(lex.pets);
        } else if (slot == "year") {
            v = anchor ? std::to_string(anchor->date.year) : std::to_string(rng.between(kSpanStart.year, kSpanEnd.year));
        } else if (slot == "date") {
            v = anchor ? anchor->date.long_form() : kSpanStart.long_form();
        }
        s[slot] = v;
    }
    return s;
}

}  // namespace qa_detail

inline constexpr int kInstancesPerTemplate = 4;

/// Questions with exact answers computed by scanning the episodes. Four
/// questions per slotted template and one per slot-free template; slot
/// values are drawn from episodes and redrawn a few times to avoid empty
/// answers, except for the deliberate never-visited destination.
inline std::vector<QaItem> generate_qa(const Timeline& t, std::uint64_t seed = 0) {
    using K = QuestionCategory::Kind;
    Rng rng(timeline_detail::stream_seed(seed ^ t.seed ^ 0x51A5ULL, t.size_class));
    std::vector<QaItem> out;
    std::set<std::string> asked;
    for (const auto& g : question_grammars()) {
        const auto slots = qa_detail::slot_names(g);
        const int instances = slots.empty() ? 1 : kInstancesPerTemplate;
        for (int i = 0; i < instances; ++i) {
            const bool unvisited = g.kind == K::DidEver && i == 1 && g.format.find("{destination}") != std::string::npos;
            std::optional<QaItem> chosen;
            for (int attempt = 0; attempt < 60 && !chosen; ++attempt) {
                const qa_detail::Slots s = qa_detail::draw_slots(rng, g, t, unvisited);
                QaItem item{render_question(g, s), {}, g.kind, g.view, s};
                if (asked.count(item.question)) continue;
                const auto eps = qa_detail::select(t, g, s);
                const auto truth = qa_detail::truth(g, eps);
                if (!truth) continue;
                const bool empty = eps.empty();
                item.truth = *truth;
                if (empty && !unvisited && attempt < 59) continue;
                chosen = std::move(item);
            }
            if (!chosen) continue;
            asked.insert(chosen->question);
            out.push_back(std::move(*chosen));
        }
    }
    return out;
}

}  // namespace postview::bench
