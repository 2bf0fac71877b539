#pragma once

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "postview/text.hpp"
#include "postview/value.hpp"

namespace postview::bench {

struct Grade {
    int value = 1;
    std::string rationale;  // rule that fired
};

namespace grader_detail {

// "December 26, 2022" and "2022-12-26" become "2022/12/26".
inline std::string canonical_dates(const std::string& s) {
    static const std::regex long_date(
        "(January|February|March|April|May|June|July|August|September|October|November|December)\\s+(\\d{1,2}),?\\s+(\\d{4})",
        std::regex::icase);
    static const std::regex iso_date("(\\d{4})[-/](\\d{1,2})[-/](\\d{1,2})");
    std::string out;
    auto month_of = [](const std::string& name) {
        for (int m = 1; m <= 12; ++m)
            if (text::iequals(name, Date::month_name(m))) return m;
        return 1;
    };
    std::string rest = s;
    std::smatch m;
    while (std::regex_search(rest, m, long_date)) {
        out += m.prefix().str();
        Date d{std::stoi(m[3].str()), month_of(m[1].str()), std::stoi(m[2].str())};
        out += d.valid() ? " " + d.to_string() + " " : m.str();
        rest = m.suffix().str();
    }
    out += rest;
    rest = out;
    out.clear();
    while (std::regex_search(rest, m, iso_date)) {
        out += m.prefix().str();
        Date d{std::stoi(m[1].str()), std::stoi(m[2].str()), std::stoi(m[3].str())};
        out += d.valid() ? " " + d.to_string() + " " : m.str();
        rest = m.suffix().str();
    }
    return out + rest;
}

inline bool is_number(const std::string& t) {
    if (t.empty()) return false;
    bool digit = false, dot = false;
    for (char c : t) {
        if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
        else if (c == '.' && !dot) dot = true;
        else return false;
    }
    return digit;
}

// "123.40" -> "123.4", "12.00" -> "12", "007" -> "7"
inline std::string canonical_number(const std::string& t) {
    return format_double(std::stod(t));
}

}  // namespace grader_detail

/// Lowercased tokens after canonicalizing dates and numbers, punctuation
/// dropped. Dates stay single tokens (YYYY/MM/DD).
inline std::vector<std::string> normalize_tokens(const std::string& s) {
    const std::string dated = grader_detail::canonical_dates(s);
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        while (!cur.empty() && (cur.back() == '.' || cur.back() == '/')) cur.pop_back();
        while (!cur.empty() && (cur.front() == '.' || cur.front() == '/')) cur.erase(cur.begin());
        if (!cur.empty()) {
            if (grader_detail::is_number(cur)) cur = grader_detail::canonical_number(cur);
            out.push_back(cur);
        }
        cur.clear();
    };
    for (std::size_t i = 0; i < dated.size(); ++i) {
        const char c = dated[i];
        if (text::is_alnum(c)) {
            cur.push_back(text::ascii_lower(c));
        } else if ((c == '.' || c == '/') && !cur.empty() && i + 1 < dated.size() &&
                   std::isdigit(static_cast<unsigned char>(dated[i + 1])) &&
                   std::isdigit(static_cast<unsigned char>(cur.back()))) {
            cur.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

inline std::set<std::string> content_set(const std::vector<std::string>& tokens) {
    std::set<std::string> out;
    for (const auto& t : tokens)
        if (!text::stopwords().count(t)) out.insert(t);
    return out;
}

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

/// A truth's values: its comma- or semicolon-separated parts, each as a
/// set of content tokens.
inline std::vector<std::set<std::string>> truth_values(const std::string& truth) {
    const std::string dated = grader_detail::canonical_dates(truth);
    std::vector<std::set<std::string>> out;
    std::size_t start = 0;
    while (start <= dated.size()) {
        std::size_t end = dated.find_first_of(",;", start);
        if (end == std::string::npos) end = dated.size();
        const auto tokens = normalize_tokens(dated.substr(start, end - start));
        std::set<std::string> v = content_set(tokens);
        // values made only of function words ("no") keep them
        if (v.empty()) v.insert(tokens.begin(), tokens.end());
        if (!v.empty()) out.push_back(std::move(v));
        start = end + 1;
    }
    return out;
}

/// Rule-based 1..5 grade of an answer against the true answer, rules tried
/// from 5 down.
inline Grade grade(const std::string& answer, const std::string& truth) {
    const auto a_tokens = normalize_tokens(answer);
    const auto t_tokens = normalize_tokens(truth);
    const std::set<std::string> a_all(a_tokens.begin(), a_tokens.end());
    const auto values = truth_values(truth);
    std::set<std::string> t_content;
    for (const auto& v : values) t_content.insert(v.begin(), v.end());
    std::set<std::string> a_content = content_set(a_tokens);
    if (a_content.empty()) a_content.insert(a_tokens.begin(), a_tokens.end());

    if (a_tokens == t_tokens) return {5, "normalized-equal"};
    if (!t_content.empty() && a_content == t_content) return {5, "equal-value-set"};
    std::size_t present = 0;
    for (const auto& v : values)
        present += std::all_of(v.begin(), v.end(), [&](const std::string& t) { return a_all.count(t) > 0; });
    if (!values.empty() && present == values.size()) return {4, "truth-determinable"};
    const double j = jaccard(a_content, t_content);
    if (j >= 0.5 || present >= 1) return {3, "some-overlap"};
    if (j > 0) return {2, "token-overlap"};
    return {1, "no-overlap"};
}

}  // namespace postview::bench
