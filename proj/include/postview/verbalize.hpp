#pragma once

#include <cstdio>
#include <string>

#include "postview/category.hpp"
#include "postview/engine.hpp"

namespace postview {

/// The answer text would exceed the configured character budget.
class ContextBudgetExceeded : public Error {
public:
    ContextBudgetExceeded(std::string text, std::size_t budget)
        : Error("context budget of " + std::to_string(budget) + " characters exceeded (" +
                std::to_string(text.size()) + " needed)"),
          text_(std::move(text)),
          budget_(budget) {}

    /// The full, untruncated answer.
    const std::string& text() const { return text_; }
    std::size_t budget() const { return budget_; }

private:
    std::string text_;
    std::size_t budget_;
};

inline constexpr std::size_t kDefaultContextBudget = 4000;

/// Dates in long form, everything else as printed.
inline std::string render_value(const Value& v) {
    if (v.type() == ValueType::Date) return v.as_date().long_form();
    return v.to_string();
}

inline std::string render_money(const Value& v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v.is_null() ? 0.0 : v.numeric());
    return buf;
}

namespace verbalize_detail {

inline std::string times(std::int64_t n) { return std::to_string(n) + (n == 1 ? " time" : " times"); }

inline std::string list_sentence(const AnnotatedTable& t) {
    std::string out = "I found " + std::to_string(t.rows.size()) + (t.rows.size() == 1 ? " record: " : " records: ");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (r) out += "; ";
        const auto& values = t.rows[r].values;
        for (std::size_t c = 0; c < values.size(); ++c) out += (c ? ", " : "") + render_value(values[c]);
    }
    return out + ".";
}

inline std::string scalar_sentence(const Value& v, const QuestionCategory& cat) {
    using K = QuestionCategory::Kind;
    constexpr const char* none = "I found no matching records.";
    switch (cat.kind) {
        case K::LastTime:
        case K::FirstTime:
            if (v.is_null()) return none;
            return std::string(cat.kind == K::LastTime ? "The last time I " : "The first time I ") + cat.phrase +
                   " was on " + render_value(v) + ".";
        case K::CountTimes:
        case K::NestedCompare:
            if (v.is_null() || v.numeric() == 0) return none;
            return "I " + cat.phrase + " " + times(static_cast<std::int64_t>(v.numeric())) + ".";
        case K::DidEver:
            if (v.is_null() || v.numeric() == 0) return "No, I never " + cat.phrase + ".";
            return "Yes, I " + cat.phrase + " " + times(static_cast<std::int64_t>(v.numeric())) + ".";
        case K::SumSpent:
            if (v.is_null()) return none;
            return "I spent $" + render_money(v) + " " + cat.phrase + ".";
        default: return "The answer is " + render_value(v) + ".";
    }
}

}  // namespace verbalize_detail

/// Deterministic English rendering of a result table. Throws
/// ContextBudgetExceeded when the text would not fit in `budget` characters.
inline std::string verbalize(const AnnotatedTable& result, const QuestionCategory& category,
                             std::size_t budget = kDefaultContextBudget) {
    using K = QuestionCategory::Kind;
    std::string out;
    if (result.rows.empty()) {
        out = category.kind == K::DidEver ? "No, I never " + category.phrase + "." : "I found no matching records.";
    } else if (category.kind == K::MostFrequent && result.rows.size() == 1 && result.rows[0].values.size() == 2) {
        const auto& v = result.rows[0].values;
        out = "The " + category.phrase + " most often is " + render_value(v[0]) + " (" +
              verbalize_detail::times(v[1].is_null() ? 0 : static_cast<std::int64_t>(v[1].numeric())) + ").";
    } else if (result.rows.size() == 1 && result.rows[0].values.size() == 1 && category.kind != K::ListOn) {
        out = verbalize_detail::scalar_sentence(result.rows[0].values[0], category);
    } else {
        out = verbalize_detail::list_sentence(result);
    }
    if (out.size() > budget) throw ContextBudgetExceeded(std::move(out), budget);
    return out;
}

}  // namespace postview
