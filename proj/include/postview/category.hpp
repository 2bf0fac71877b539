#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "postview/value.hpp"

namespace postview {

/// Question shape; each kind has one SQL template.
struct QuestionCategory {
    enum class Kind { CountTimes, LastTime, FirstTime, ListOn, MostFrequent, DidEver, SumSpent, NestedCompare };

    Kind kind = Kind::CountTimes;
    /// Verb phrase used when answering, e.g. "chatted with Avery".
    std::string phrase;
    /// Date slot of ListOn.
    std::optional<Date> date;

    friend bool operator==(const QuestionCategory&, const QuestionCategory&) = default;
};

inline constexpr QuestionCategory::Kind kAllCategoryKinds[] = {
    QuestionCategory::Kind::CountTimes,   QuestionCategory::Kind::LastTime, QuestionCategory::Kind::FirstTime,
    QuestionCategory::Kind::ListOn,       QuestionCategory::Kind::MostFrequent, QuestionCategory::Kind::DidEver,
    QuestionCategory::Kind::SumSpent,     QuestionCategory::Kind::NestedCompare,
};

inline const char* to_string(QuestionCategory::Kind k) {
    switch (k) {
        case QuestionCategory::Kind::CountTimes: return "CountTimes";
        case QuestionCategory::Kind::LastTime: return "LastTime";
        case QuestionCategory::Kind::FirstTime: return "FirstTime";
        case QuestionCategory::Kind::ListOn: return "ListOn";
        case QuestionCategory::Kind::MostFrequent: return "MostFrequent";
        case QuestionCategory::Kind::DidEver: return "DidEver";
        case QuestionCategory::Kind::SumSpent: return "SumSpent";
        case QuestionCategory::Kind::NestedCompare: return "NestedCompare";
    }
    return "?";
}

inline std::optional<QuestionCategory::Kind> parse_category_kind(std::string_view s) {
    for (auto k : kAllCategoryKinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

/// Count, sum and most-frequent questions must aggregate inside SQL.
inline bool is_aggregate_category(QuestionCategory::Kind k) {
    return k == QuestionCategory::Kind::CountTimes || k == QuestionCategory::Kind::SumSpent ||
           k == QuestionCategory::Kind::MostFrequent || k == QuestionCategory::Kind::NestedCompare ||
           k == QuestionCategory::Kind::DidEver;
}

}  // namespace postview
