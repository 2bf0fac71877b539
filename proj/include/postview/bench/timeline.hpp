#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "postview/catalog.hpp"
#include "postview/rbe.hpp"
#include "postview/value.hpp"

namespace postview::bench {

enum class SizeClass { S, M, L };

inline const char* to_string(SizeClass s) {
    switch (s) {
        case SizeClass::S: return "S";
        case SizeClass::M: return "M";
        case SizeClass::L: return "L";
    }
    return "?";
}

inline std::optional<SizeClass> parse_size_class(std::string_view s) {
    if (s == "S" || s == "s") return SizeClass::S;
    if (s == "M" || s == "m") return SizeClass::M;
    if (s == "L" || s == "l") return SizeClass::L;
    return std::nullopt;
}

/// Serialized JSONL bytes at scale 1.0 (1 MB = 10^6 bytes).
inline std::size_t target_bytes(SizeClass s) {
    switch (s) {
        case SizeClass::S: return 1'100'000;
        case SizeClass::M: return 2'400'000;
        case SizeClass::L: return 5'600'000;
    }
    return 0;
}

enum class Activity { Chat, Trip, Purchase, Exercise, Pet };

inline const char* to_string(Activity a) {
    switch (a) {
        case Activity::Chat: return "chat";
        case Activity::Trip: return "trip";
        case Activity::Purchase: return "purchase";
        case Activity::Exercise: return "exercise";
        case Activity::Pet: return "pet";
    }
    return "?";
}

/// One dated personal event. Attribute meaning depends on the activity:
/// chat: friends, topic, minutes; trip: destination, companion, nights;
/// purchase: item, store, price; exercise: activity, companion, minutes;
/// pet: pet, activity.
struct Episode {
    std::string eid;
    Date date;
    Activity activity = Activity::Chat;
    std::vector<std::string> people;  // chat friends, in order
    std::string a;                    // topic / destination / item / exercise / pet
    std::string b;                    // companion / store / pet activity
    std::int64_t n = 0;               // minutes / nights
    double price = 0.0;
    std::string description;
};

struct Lexicon {
    std::vector<std::string> people{"Avery",  "Jordan", "Riley",  "Morgan", "Casey",  "Taylor",
                                    "Quinn",  "Parker", "Rowan",  "Emery",  "Hayden", "Sawyer"};
    std::vector<std::string> topics{"movies",   "work",    "cooking", "music",  "books",
                                    "politics", "science", "family",  "garden", "sports"};
    std::vector<std::string> destinations{"Paris", "Tokyo", "Lisbon", "Chicago", "Denver",
                                          "Boston", "Seattle", "Rome", "Vienna", "Sydney"};
    std::string unvisited_destination = "Reykjavik";
    std::vector<std::string> items{"coffee",   "sneakers", "headphones", "groceries", "lamp",
                                   "umbrella", "backpack", "candles",    "notebook",  "jacket"};
    std::vector<std::string> stores{"Target", "Costco", "Walmart", "Safeway", "Ikea", "Amazon", "Kroger", "Macys"};
    std::vector<std::string> exercises{"hiking", "running", "swimming", "cycling", "yoga", "tennis", "climbing",
                                       "boxing"};
    std::vector<std::string> pets{"Biscuit", "Luna", "Milo"};
    std::vector<std::string> pet_activities{"vet", "grooming", "walk", "bath"};
};

inline const Lexicon& lexicon() {
    static const Lexicon lex;
    return lex;
}

inline const Date kSpanStart{2021, 1, 1};
inline const Date kSpanEnd{2023, 12, 31};

struct Timeline {
    SizeClass size_class = SizeClass::S;
    std::uint64_t seed = 0;
    double scale = 1.0;
    std::vector<Episode> episodes;
};

/// Deterministic draws over a standardized engine; distributions are done by
/// hand because std:: distributions differ between library vendors.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo + 1)));
    }
    double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }
    /// Zipf-like skew so that "most often" questions have clear winners.
    template <class T>
    const T& pick_skewed(const std::vector<T>& v) {
        double total = 0;
        for (std::size_t i = 0; i < v.size(); ++i) total += 1.0 / static_cast<double>(i + 1);
        double r = unit() * total;
        for (std::size_t i = 0; i < v.size(); ++i) {
            r -= 1.0 / static_cast<double>(i + 1);
            if (r < 0) return v[i];
        }
        return v.back();
    }

private:
    std::mt19937_64 engine_;
};

inline std::string money(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string join_people(const std::vector<std::string>& people) {
    std::string out;
    for (std::size_t i = 0; i < people.size(); ++i) out += (i ? " and " : "") + people[i];
    return out;
}

inline std::string describe(const Episode& e) {
    switch (e.activity) {
        case Activity::Chat:
            return "I chatted with " + join_people(e.people) + " about " + e.a + " for " + std::to_string(e.n) +
                   " minutes.";
        case Activity::Trip:
            return "I traveled to " + e.a + " with " + e.b + " for " + std::to_string(e.n) + " nights.";
        case Activity::Purchase: return "I bought " + e.a + " at " + e.b + " for $" + money(e.price) + ".";
        case Activity::Exercise:
            return "I went " + e.a + " with " + e.b + " for " + std::to_string(e.n) + " minutes.";
        case Activity::Pet:
            if (e.b == "vet") return "I took my pet " + e.a + " to the vet.";
            if (e.b == "walk") return "I took my pet " + e.a + " for a walk.";
            return "I took my pet " + e.a + " for " + (e.b == "bath" ? "a bath." : e.b + ".");
    }
    return {};
}

inline nlohmann::json to_json(const Episode& e) {
    nlohmann::json attrs;
    switch (e.activity) {
        case Activity::Chat: attrs = {{"friends", e.people}, {"topic", e.a}, {"duration_min", e.n}}; break;
        case Activity::Trip: attrs = {{"destination", e.a}, {"companion", e.b}, {"nights", e.n}}; break;
        case Activity::Purchase: attrs = {{"item", e.a}, {"store", e.b}, {"price", money(e.price)}}; break;
        case Activity::Exercise: attrs = {{"activity", e.a}, {"companion", e.b}, {"duration_min", e.n}}; break;
        case Activity::Pet: attrs = {{"pet", e.a}, {"activity", e.b}}; break;
    }
    return {{"eid", e.eid},
            {"date", e.date.to_string()},
            {"type", to_string(e.activity)},
            {"attributes", attrs},
            {"description", e.description}};
}

/// JSON lines, one episode per line.
inline std::string serialize(const Timeline& t) {
    std::string out;
    for (const auto& e : t.episodes) out += to_json(e).dump() + "\n";
    return out;
}

namespace timeline_detail {

inline Episode draw_episode(Rng& rng) {
    const auto& lex = lexicon();
    Episode e;
    const double r = rng.unit();
    if (r < 0.40) {
        e.activity = Activity::Chat;
        e.people.push_back(rng.pick_skewed(lex.people));
        if (rng.unit() < 0.35) {
            std::string second = rng.pick(lex.people);
            if (second != e.people.front()) e.people.push_back(second);
        }
        e.a = rng.pick_skewed(lex.topics);
        e.n = rng.between(5, 120);
    } else if (r < 0.65) {
        e.activity = Activity::Exercise;
        e.a = rng.pick_skewed(lex.exercises);
        e.b = rng.pick(lex.people);
        e.n = rng.between(20, 150);
    } else if (r < 0.85) {
        e.activity = Activity::Purchase;
        e.a = rng.pick(lex.items);
        e.b = rng.pick_skewed(lex.stores);
        e.price = static_cast<double>(rng.between(199, 25000)) / 100.0;
    } else if (r < 0.95) {
        e.activity = Activity::Pet;
        e.a = rng.pick(lex.pets);
        e.b = rng.pick(lex.pet_activities);
    } else {
        e.activity = Activity::Trip;
        e.a = rng.pick_skewed(lex.destinations);
        e.b = rng.pick(lex.people);
        e.n = rng.between(1, 14);
    }
    e.description = describe(e);
    return e;
}

inline std::uint64_t stream_seed(std::uint64_t seed, SizeClass size) {
    // splitmix64 of (seed, size) so each size class gets its own stream
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(size) + 1;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace timeline_detail

/// Draws episodes until the serialized timeline reaches the size target,
/// then spreads them over the span in date order and numbers them e1..eN.
inline Timeline generate_timeline(SizeClass size, std::uint64_t seed, double scale = 1.0) {
    Timeline t{size, seed, scale, {}};
    Rng rng(timeline_detail::stream_seed(seed, size));
    const auto target = static_cast<std::size_t>(static_cast<double>(target_bytes(size)) * scale);
    std::size_t bytes = 0;
    while (bytes < target) {
        Episode e = timeline_detail::draw_episode(rng);
        e.eid = "e" + std::to_string(t.episodes.size() + 1);
        bytes += to_json(e).dump().size() + 1;
        t.episodes.push_back(std::move(e));
    }
    const int first = kSpanStart.ordinal();
    const int days = kSpanEnd.ordinal() - first + 1;
    std::vector<int> ords;
    ords.reserve(t.episodes.size());
    for (std::size_t i = 0; i < t.episodes.size(); ++i) ords.push_back(first + static_cast<int>(rng.below(days)));
    std::sort(ords.begin(), ords.end());
    for (std::size_t i = 0; i < t.episodes.size(); ++i) {
        t.episodes[i].date = Date::from_ordinal(ords[i]);
        t.episodes[i].eid = "e" + std::to_string(i + 1);
    }
    return t;
}

/// Views and documents derived from a timeline.
struct TimelineData {
    Catalog views;  // one view per activity type
    Catalog flat;   // the single (date, description) view
    std::vector<Document> documents;
};

inline TimelineData build_views(const Timeline& t) {
    using VT = ValueType;
    auto table = [](std::string name, std::vector<Column> cols) {
        SourceTable s;
        s.name = std::move(name);
        s.schema.columns = std::move(cols);
        s.schema.key = {"eid"};
        return s;
    };
    SourceTable chats = table("daily_chat_log", {{"eid", VT::Text}, {"date", VT::Date}, {"friends", VT::Text},
                                                 {"topic", VT::Text}, {"duration_min", VT::Int}});
    SourceTable trips = table("trips", {{"eid", VT::Text}, {"date", VT::Date}, {"destination", VT::Text},
                                        {"companion", VT::Text}, {"nights", VT::Int}});
    SourceTable purchases = table("purchases", {{"eid", VT::Text}, {"date", VT::Date}, {"item", VT::Text},
                                                {"store", VT::Text}, {"price", VT::Float}});
    SourceTable exercise = table("exercise_log", {{"eid", VT::Text}, {"date", VT::Date}, {"activity", VT::Text},
                                                  {"companion", VT::Text}, {"duration_min", VT::Int}});
    SourceTable pets = table("pet_care", {{"eid", VT::Text}, {"date", VT::Date}, {"pet", VT::Text},
                                          {"activity", VT::Text}});
    SourceTable flat = table("timeline", {{"eid", VT::Text}, {"date", VT::Date}, {"description", VT::Text}});

    TimelineData d;
    for (const auto& e : t.episodes) {
        const Value id(e.eid), date(e.date);
        switch (e.activity) {
            case Activity::Chat:
                chats.rows.push_back({id, date, Value(join_people(e.people)), Value(e.a), Value(e.n)});
                break;
            case Activity::Trip: trips.rows.push_back({id, date, Value(e.a), Value(e.b), Value(e.n)}); break;
            case Activity::Purchase:
                purchases.rows.push_back({id, date, Value(e.a), Value(e.b), Value(e.price)});
                break;
            case Activity::Exercise: exercise.rows.push_back({id, date, Value(e.a), Value(e.b), Value(e.n)}); break;
            case Activity::Pet: pets.rows.push_back({id, date, Value(e.a), Value(e.b)}); break;
        }
        flat.rows.push_back({id, date, Value(e.description)});
        d.documents.push_back({e.eid, episode_document(e.date, e.description)});
    }
    d.views.register_view("daily_chat_log", "who I chat or chatted with each day, the chat topic and how long we talked",
                          std::move(chats));
    d.views.register_view("trips", "places I travel or traveled to on trips, who came along and how many nights",
                          std::move(trips));
    d.views.register_view("purchases", "items I buy or bought when I shop, the store and how much I spend",
                          std::move(purchases));
    d.views.register_view("exercise_log", "exercise activities I do, like hiking or running, and with whom",
                          std::move(exercise));
    d.views.register_view("pet_care", "care for my pets: vet visits, when I groomed them, walks and baths", std::move(pets));
    d.flat.register_view("timeline", "every episode of my life as a dated sentence", std::move(flat));
    return d;
}

}  // namespace postview::bench
