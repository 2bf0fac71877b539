#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "postview/catalog.hpp"
#include "postview/text.hpp"

namespace postview {

struct ViewScore {
    std::string view;
    double score = 0.0;
};

struct RouteDecision {
    enum class Kind { Vbe, Rbe };
    Kind kind = Kind::Rbe;
    std::string view;       // Vbe
    double confidence = 0;  // Vbe
    std::string reason;     // Rbe

    static RouteDecision vbe(std::string view, double confidence) {
        return {Kind::Vbe, std::move(view), confidence, {}};
    }
    static RouteDecision rbe(std::string reason) { return {Kind::Rbe, {}, 0.0, std::move(reason)}; }

    bool is_vbe() const { return kind == Kind::Vbe; }
};

inline constexpr double kDefaultRouteThreshold = 0.15;
inline constexpr const char* kNoViewAboveThreshold = "no-view-above-threshold";
inline constexpr const char* kTranslatorFailure = "translator-failure";
inline constexpr const char* kEngineErrorFallback = "engine-error-fallback";

/// At most this many distinct cell tokens per view take part in matching.
inline constexpr std::size_t kCellTokenSample = 2000;

/// Token weights of one view: 2 for description, column and view-name
/// tokens, 1 for sampled cell tokens.
inline std::map<std::string, int> view_vocabulary(const View& view) {
    std::map<std::string, int> vocab;
    auto add = [&](const std::string& tok, int w) {
        int& slot = vocab[tok];
        slot = std::max(slot, w);
    };
    for (const auto& t : text::content_tokens(view.description)) add(t, 2);
    for (const auto& t : text::alnum_tokens(view.name)) add(t, 2);
    const auto& schema = view.table.schema;
    for (const auto& c : schema.columns)
        for (const auto& t : text::alnum_tokens(c.name)) add(t, 2);

    std::set<std::string> cells;
    const auto keys = schema.key_indexes();
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        if (schema.columns[c].type != ValueType::Text) continue;
        if (std::find(keys.begin(), keys.end(), c) != keys.end()) continue;
        for (const auto& row : view.table.rows)
            if (!row[c].is_null())
                for (auto& t : text::content_tokens(row[c].as_text())) cells.insert(std::move(t));
    }
    std::size_t taken = 0;
    for (const auto& t : cells) {
        if (taken++ == kCellTokenSample) break;
        add(t, 1);
    }
    return vocab;
}

/// Lexical overlap of the question's content tokens with each view, in
/// [0,1], best first; ties broken by view name.
inline std::vector<ViewScore> match_view(const std::string& question, const Catalog& catalog) {
    std::vector<std::string> tokens = text::content_tokens(question);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

    std::vector<ViewScore> out;
    for (const View* view : catalog.views()) {
        double score = 0.0;
        if (!tokens.empty()) {
            const auto vocab = view_vocabulary(*view);
            int total = 0;
            for (const auto& t : tokens) {
                auto it = vocab.find(t);
                if (it != vocab.end()) total += it->second;
            }
            score = static_cast<double>(total) / (2.0 * static_cast<double>(tokens.size()));
        }
        out.push_back({view->name, score});
    }
    std::stable_sort(out.begin(), out.end(), [](const ViewScore& a, const ViewScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.view < b.view;
    });
    return out;
}

inline RouteDecision route(const std::string& question, const Catalog& catalog,
                           double threshold = kDefaultRouteThreshold) {
    auto ranking = match_view(question, catalog);
    if (ranking.empty() || ranking.front().score < threshold) return RouteDecision::rbe(kNoViewAboveThreshold);
    return RouteDecision::vbe(ranking.front().view, ranking.front().score);
}

}  // namespace postview
