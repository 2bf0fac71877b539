#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "postview/text.hpp"

namespace postview {

/// SQL LIKE: `%` matches any run, `_` any single character. ASCII letters
/// compare case-insensitively, as in SQLite.
inline bool like_match(std::string_view value, std::string_view pattern) {
    // Iterative matcher with single backtrack point for the last `%`.
    std::size_t v = 0, p = 0, star_p = std::string_view::npos, star_v = 0;
    while (v < value.size()) {
        if (p < pattern.size() && pattern[p] == '%') {
            star_p = p++;
            star_v = v;
        } else if (p < pattern.size() &&
                   (pattern[p] == '_' || text::ascii_lower(pattern[p]) == text::ascii_lower(value[v]))) {
            ++p;
            ++v;
        } else if (star_p != std::string_view::npos) {
            p = star_p + 1;
            v = ++star_v;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '%') ++p;
    return p == pattern.size();
}

/// Lowercases, drops `%`, and collapses whitespace runs to single spaces.
inline std::string normalize_for_match(std::string_view s) {
    std::string stripped;
    for (char c : s)
        if (c != '%') stripped.push_back(c);
    return text::join(text::whitespace_tokens(text::to_lower(stripped)), " ");
}

/// Fuzzy text predicate behind CLOSE_ENOUGH(pattern, value).
///
/// After stripping `%`, case-folding and whitespace normalization, the
/// pattern matches when it occurs in the value as a whole-token run, or
/// when its similarity 1 - lev/max(len) to some whitespace token of the
/// value reaches `threshold`.
inline bool close_enough(std::string_view pattern, std::string_view value, double threshold = 0.8) {
    const std::string needle = normalize_for_match(pattern);
    const std::string hay = normalize_for_match(value);
    if (needle.empty()) return true;
    const std::string padded_hay = " " + hay + " ";
    if (padded_hay.find(" " + needle + " ") != std::string::npos) return true;
    for (const auto& token : text::whitespace_tokens(hay))
        if (text::similarity(needle, token) >= threshold) return true;
    return false;
}

}  // namespace postview
