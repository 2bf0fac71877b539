#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "postview/text.hpp"

namespace postview {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    friend auto operator<=>(const Date&, const Date&) = default;

    static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

    static int days_in_month(int y, int m) {
        static constexpr int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return m == 2 && is_leap(y) ? 29 : table[m - 1];
    }

    bool valid() const {
        return year >= 1 && year <= 9999 && month >= 1 && month <= 12 && day >= 1 &&
               day <= days_in_month(year, month);
    }

    /// Accepts `YYYY/MM/DD` and `YYYY-MM-DD`.
    static std::optional<Date> parse(std::string_view s) {
        if (s.size() != 10) return std::nullopt;
        const char sep = s[4];
        if ((sep != '/' && sep != '-') || s[7] != sep) return std::nullopt;
        auto num = [&](std::size_t pos, std::size_t len, int& out) {
            auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
            return ec == std::errc{} && p == s.data() + pos + len;
        };
        Date d;
        if (!num(0, 4, d.year) || !num(5, 2, d.month) || !num(8, 2, d.day)) return std::nullopt;
        if (!d.valid()) return std::nullopt;
        return d;
    }

    std::string to_string() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d/%02d/%02d", year, month, day);
        return buf;
    }

    static const char* month_name(int m) {
        static const char* names[] = {"January", "February", "March",     "April",   "May",      "June",
                                      "July",    "August",   "September", "October", "November", "December"};
        return names[m - 1];
    }

    /// "December 26, 2022"
    std::string long_form() const {
        return std::string(month_name(month)) + " " + std::to_string(day) + ", " + std::to_string(year);
    }

    /// Parses the long form, "December 26, 2022" (month name case-insensitive).
    static std::optional<Date> parse_long(std::string_view s) {
        const auto space = s.find(' ');
        const auto comma = s.find(',');
        if (space == std::string_view::npos || comma == std::string_view::npos || comma < space) return std::nullopt;
        Date d;
        d.month = 0;
        for (int m = 1; m <= 12; ++m)
            if (text::iequals(s.substr(0, space), month_name(m))) d.month = m;
        if (d.month == 0) return std::nullopt;
        const std::string_view day = s.substr(space + 1, comma - space - 1);
        std::string_view year = s.substr(comma + 1);
        while (!year.empty() && year.front() == ' ') year.remove_prefix(1);
        auto [p1, e1] = std::from_chars(day.data(), day.data() + day.size(), d.day);
        auto [p2, e2] = std::from_chars(year.data(), year.data() + year.size(), d.year);
        if (e1 != std::errc{} || e2 != std::errc{} || p1 != day.data() + day.size() ||
            p2 != year.data() + year.size() || !d.valid())
            return std::nullopt;
        return d;
    }

    /// Days since 0001/01/01, for arithmetic on generated timelines.
    int ordinal() const {
        const int y = year - 1;
        int days = y * 365 + y / 4 - y / 100 + y / 400;
        for (int m = 1; m < month; ++m) days += days_in_month(year, m);
        return days + day - 1;
    }

    static Date from_ordinal(int ord) {
        Date d{1, 1, 1};
        d.year = ord / 366 + 1;
        ord -= Date{d.year, 1, 1}.ordinal();
        while (true) {
            const int len = is_leap(d.year) ? 366 : 365;
            if (ord < len) break;
            ord -= len;
            ++d.year;
        }
        while (ord >= days_in_month(d.year, d.month)) {
            ord -= days_in_month(d.year, d.month);
            ++d.month;
        }
        d.day = ord + 1;
        return d;
    }
};

enum class ValueType { Null, Bool, Int, Float, Text, Date };

inline const char* type_name(ValueType t) {
    switch (t) {
        case ValueType::Null: return "null";
        case ValueType::Bool: return "bool";
        case ValueType::Int: return "int";
        case ValueType::Float: return "float";
        case ValueType::Text: return "text";
        case ValueType::Date: return "date";
    }
    return "?";
}

inline std::optional<ValueType> parse_type_name(std::string_view s) {
    const std::string l = text::to_lower(s);
    if (l == "bool") return ValueType::Bool;
    if (l == "int") return ValueType::Int;
    if (l == "float") return ValueType::Float;
    if (l == "text") return ValueType::Text;
    if (l == "date") return ValueType::Date;
    return std::nullopt;
}

inline bool is_numeric(ValueType t) { return t == ValueType::Int || t == ValueType::Float; }

/// Shortest decimal text that round-trips through strtod.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

class Value {
public:
    using Storage = std::variant<std::monostate, bool, std::int64_t, double, std::string, Date>;

    Value() = default;
    Value(std::nullptr_t) {}
    Value(bool b) : v_(b) {}
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(std::int64_t i) : v_(i) {}
    Value(double d) : v_(d) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(Date d) : v_(d) {}

    ValueType type() const { return static_cast<ValueType>(v_.index()); }
    bool is_null() const { return v_.index() == 0; }

    bool as_bool() const { return std::get<bool>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_float() const { return std::get<double>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    const Date& as_date() const { return std::get<Date>(v_); }

    double numeric() const { return type() == ValueType::Int ? static_cast<double>(as_int()) : as_float(); }

    const Storage& storage() const { return v_; }

    /// Structural equality (type and payload); not SQL equality.
    friend bool operator==(const Value&, const Value&) = default;

    /// Total order for containers: type rank first, then payload.
    friend bool operator<(const Value& a, const Value& b) { return a.v_ < b.v_; }

    /// Display text; dates as YYYY/MM/DD, null as NULL.
    std::string to_string() const {
        switch (type()) {
            case ValueType::Null: return "NULL";
            case ValueType::Bool: return as_bool() ? "true" : "false";
            case ValueType::Int: return std::to_string(as_int());
            case ValueType::Float: return format_double(as_float());
            case ValueType::Text: return as_text();
            case ValueType::Date: return as_date().to_string();
        }
        return {};
    }

private:
    Storage v_;
};

/// Coerces raw cell text to a typed value. Empty text is Null.
inline std::optional<Value> coerce(std::string_view raw, ValueType type) {
    if (raw.empty()) return Value{};
    switch (type) {
        case ValueType::Null: return Value{};
        case ValueType::Text: return Value(std::string(raw));
        case ValueType::Bool: {
            const std::string l = text::to_lower(raw);
            if (l == "true" || l == "1") return Value(true);
            if (l == "false" || l == "0") return Value(false);
            return std::nullopt;
        }
        case ValueType::Int: {
            std::int64_t v{};
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec != std::errc{} || p != raw.data() + raw.size()) return std::nullopt;
            return Value(v);
        }
        case ValueType::Float: {
            double v{};
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec != std::errc{} || p != raw.data() + raw.size()) return std::nullopt;
            return Value(v);
        }
        case ValueType::Date: {
            auto d = Date::parse(raw);
            if (!d) return std::nullopt;
            return Value(*d);
        }
    }
    return std::nullopt;
}

/// SQL comparison. Returns nullopt when either side is Null or the types are
/// not comparable. Text against Date compares after parsing the text as a date.
inline std::optional<std::strong_ordering> sql_compare(const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) return std::nullopt;
    const ValueType ta = a.type(), tb = b.type();
    if (is_numeric(ta) && is_numeric(tb)) {
        if (ta == ValueType::Int && tb == ValueType::Int) return a.as_int() <=> b.as_int();
        const double x = a.numeric(), y = b.numeric();
        if (x < y) return std::strong_ordering::less;
        if (x > y) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    if (ta == ValueType::Date && tb == ValueType::Text) {
        auto d = Date::parse(b.as_text());
        if (!d) return std::nullopt;
        return a.as_date() <=> *d;
    }
    if (ta == ValueType::Text && tb == ValueType::Date) {
        auto d = Date::parse(a.as_text());
        if (!d) return std::nullopt;
        return *d <=> b.as_date();
    }
    if (ta != tb) return std::nullopt;
    switch (ta) {
        case ValueType::Bool: return a.as_bool() <=> b.as_bool();
        case ValueType::Text: return a.as_text().compare(b.as_text()) <=> 0;
        case ValueType::Date: return a.as_date() <=> b.as_date();
        default: return std::nullopt;
    }
}

/// Ordering used by ORDER BY, MIN and MAX: Nulls first, then sql_compare,
/// falling back to the structural order for incomparable pairs.
inline std::strong_ordering sort_compare(const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) {
        if (a.is_null() && b.is_null()) return std::strong_ordering::equal;
        return a.is_null() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = sql_compare(a, b)) return *c;
    if (a < b) return std::strong_ordering::less;
    if (b < a) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace postview
