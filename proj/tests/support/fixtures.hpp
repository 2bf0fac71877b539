#pragma once

#include <random>
#include <string>
#include <vector>

#include "postview/catalog.hpp"

namespace postview::testing {

inline SourceTable make_table(std::string name, std::vector<Column> cols, std::vector<std::string> key,
                              std::vector<Row> rows) {
    SourceTable t;
    t.name = std::move(name);
    t.schema.columns = std::move(cols);
    t.schema.key = std::move(key);
    t.rows = std::move(rows);
    return t;
}

inline TupleId tid(std::string view, std::string key) { return TupleId{std::move(view), {Value(std::move(key))}}; }

/// R(rid, a, b) and S(sid, a, c), small enough for exhaustive subset checks.
struct SmallWorld {
    std::vector<Row> r, s;

    Catalog catalog() const { return subset(std::vector<bool>(r.size() + s.size(), true)); }

    std::size_t size() const { return r.size() + s.size(); }

    /// Catalog with only the rows whose bit is set (R rows first, then S).
    Catalog subset(const std::vector<bool>& keep) const {
        std::vector<Row> rr, ss;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (keep[i]) rr.push_back(r[i]);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (keep[r.size() + i]) ss.push_back(s[i]);
        Catalog c;
        c.register_view("R", "relation r", make_table("R", {{"rid", ValueType::Text}, {"a", ValueType::Int}, {"b", ValueType::Text}}, {"rid"}, rr));
        c.register_view("S", "relation s", make_table("S", {{"sid", ValueType::Text}, {"a", ValueType::Int}, {"c", ValueType::Text}}, {"sid"}, ss));
        return c;
    }

    TupleId id(std::size_t i) const {
        return i < r.size() ? TupleId{"R", {r[i][0]}} : TupleId{"S", {s[i - r.size()][0]}};
    }
};

inline const std::vector<std::string>& world_words() {
    static const std::vector<std::string> w{"x", "y", "Avery", "Avry", "Jordan", "x y"};
    return w;
}

inline SmallWorld random_world(std::mt19937_64& rng, std::size_t max_rows = 12) {
    auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    SmallWorld w;
    const std::size_t nr = 2 + below(5);                       // 2..6
    const std::size_t ns = 1 + below(std::min<std::size_t>(6, max_rows - nr));  // 1..6
    auto a_value = [&]() { return below(8) == 0 ? Value() : Value(static_cast<std::int64_t>(1 + below(3))); };
    for (std::size_t i = 0; i < nr; ++i)
        w.r.push_back({Value("r" + std::to_string(i + 1)), a_value(), Value(world_words()[below(world_words().size())])});
    for (std::size_t i = 0; i < ns; ++i)
        w.s.push_back({Value("s" + std::to_string(i + 1)), a_value(), Value(world_words()[below(world_words().size())])});
    return w;
}

}  // namespace postview::testing
