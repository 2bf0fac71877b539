#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "postview/catalog.hpp"
#include "postview/category.hpp"
#include "postview/nl2sql.hpp"
#include "postview/text.hpp"
#include "postview/verbalize.hpp"

namespace postview {

class RbeError : public Error {
public:
    using Error::Error;
};

struct Document {
    std::string doc_id;
    std::string text;
};

struct RbeConfig {
    std::size_t k = 4;
    double k1 = 1.2;
    double b = 0.75;
};

struct Hit {
    std::string doc_id;
    double score = 0.0;
};

/// BM25 inverted index. Immutable once built.
class Index {
public:
    Index() = default;

    explicit Index(std::vector<Document> docs) : docs_(std::move(docs)) {
        for (std::size_t i = 0; i < docs_.size(); ++i) {
            const auto& d = docs_[i];
            if (!by_id_.emplace(d.doc_id, i).second) throw RbeError("duplicate doc_id '" + d.doc_id + "'");
            if (d.text.empty()) throw RbeError("document '" + d.doc_id + "' has no text");
        }
        double total = 0;
        lengths_.reserve(docs_.size());
        for (std::size_t i = 0; i < docs_.size(); ++i) {
            const auto tokens = text::alnum_tokens(docs_[i].text);
            lengths_.push_back(tokens.size());
            total += static_cast<double>(tokens.size());
            std::map<std::string, std::uint32_t> tf;
            for (const auto& t : tokens) ++tf[t];
            for (const auto& [t, n] : tf) postings_[t].push_back({static_cast<std::uint32_t>(i), n});
        }
        avgdl_ = docs_.empty() ? 0.0 : total / static_cast<double>(docs_.size());
    }

    std::size_t size() const { return docs_.size(); }
    double average_length() const { return avgdl_; }
    std::size_t vocabulary_size() const { return postings_.size(); }
    std::size_t document_frequency(const std::string& term) const {
        auto it = postings_.find(term);
        return it == postings_.end() ? 0 : it->second.size();
    }
    const std::vector<Document>& documents() const { return docs_; }

    const Document* find(const std::string& doc_id) const {
        auto it = by_id_.find(doc_id);
        return it == by_id_.end() ? nullptr : &docs_[it->second];
    }

    double idf(const std::string& term) const {
        const double n = static_cast<double>(docs_.size());
        const double df = static_cast<double>(document_frequency(term));
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }

    /// Top-k documents by BM25 over the query's distinct terms; ties by doc_id.
    std::vector<Hit> retrieve(const std::string& query, const RbeConfig& config = {}) const {
        std::vector<std::string> terms = text::alnum_tokens(query);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        std::map<std::uint32_t, double> scores;
        for (const auto& t : terms) {
            auto it = postings_.find(t);
            if (it == postings_.end()) continue;
            const double w = idf(t);
            for (const auto& p : it->second) {
                const double tf = p.tf;
                const double len = static_cast<double>(lengths_[p.doc]);
                const double norm = config.k1 * (1.0 - config.b + config.b * len / avgdl_);
                scores[p.doc] += w * (tf * (config.k1 + 1.0)) / (tf + norm);
            }
        }
        std::vector<Hit> hits;
        hits.reserve(scores.size());
        for (const auto& [doc, s] : scores) hits.push_back({docs_[doc].doc_id, s});
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.doc_id < b.doc_id;
        });
        if (hits.size() > config.k) hits.resize(config.k);
        return hits;
    }

    /// The documents are the whole state; the index is rebuilt on load.
    nlohmann::json to_json() const {
        nlohmann::json docs = nlohmann::json::array();
        for (const auto& d : docs_) docs.push_back({{"doc_id", d.doc_id}, {"text", d.text}});
        return {{"format", "postview-bm25-v1"}, {"documents", docs}};
    }

    static Index from_json(const nlohmann::json& j) {
        if (j.value("format", "") != "postview-bm25-v1") throw RbeError("not a postview index file");
        std::vector<Document> docs;
        for (const auto& d : j.at("documents")) docs.push_back({d.at("doc_id"), d.at("text")});
        return Index(std::move(docs));
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw RbeError("cannot write " + path.string());
        out << to_json().dump() << "\n";
    }

    static Index load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw RbeError("cannot read " + path.string());
        return from_json(nlohmann::json::parse(in));
    }

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    std::vector<Document> docs_;
    std::map<std::string, std::size_t> by_id_;
    std::vector<std::size_t> lengths_;
    std::map<std::string, std::vector<Posting>> postings_;
    double avgdl_ = 0.0;
};

inline Index build_index(std::vector<Document> docs) { return Index(std::move(docs)); }

/// Document text for one episode.
inline std::string episode_document(const Date& date, const std::string& description) {
    return "On " + date.long_form() + ", " + description;
}

/// JSON lines of {"doc_id", "text"}; blank lines skipped.
inline std::vector<Document> load_documents(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RbeError("cannot read " + path.string());
    std::vector<Document> docs;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            docs.push_back({j.at("doc_id").get<std::string>(), j.at("text").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw RbeError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return docs;
}

/// One document per view row when a catalog ships without documents: the
/// row's date (if any) in long form, then its non-key cells.
inline std::vector<Document> documents_from_catalog(const Catalog& catalog) {
    std::vector<Document> docs;
    for (const View* v : catalog.views()) {
        const auto& schema = v->table.schema;
        for (const auto& row : v->table.rows) {
            std::string id, date, rest;
            for (std::size_t c = 0; c < schema.columns.size(); ++c) {
                const auto& col = schema.columns[c];
                if (std::find(schema.key.begin(), schema.key.end(), col.name) != schema.key.end()) {
                    id += (id.empty() ? "" : ",") + row[c].to_string();
                } else if (row[c].type() == ValueType::Date && date.empty()) {
                    date = row[c].as_date().long_form();
                } else if (!row[c].is_null()) {
                    rest += (rest.empty() ? "" : ", ") + col.name + " " + row[c].to_string();
                }
            }
            docs.push_back({id, (date.empty() ? "" : "On " + date + ", ") + v->name + ": " + rest});
        }
    }
    return docs;
}

struct RbeAnswer {
    std::string text;
    std::vector<Hit> sources;
};

inline constexpr const char* kNoRelevantRecords = "I could not find relevant records.";

namespace rbe_detail {

// Leading "On December 26, 2022," of a document.
inline std::optional<Date> document_date(const std::string& doc) {
    if (doc.rfind("On ", 0) != 0) return std::nullopt;
    const auto comma = doc.find(',', 3);
    if (comma == std::string::npos) return std::nullopt;
    const auto end = doc.find(',', comma + 1);
    return Date::parse_long(doc.substr(3, end == std::string::npos ? std::string::npos : end - 3));
}

inline bool mentions_all(const std::string& doc, const std::vector<std::string>& needles) {
    const auto tokens = text::alnum_tokens(doc);
    const std::set<std::string> have(tokens.begin(), tokens.end());
    for (const auto& n : needles)
        for (const auto& t : text::alnum_tokens(n))
            if (!have.count(t)) return false;
    return true;
}

inline std::vector<double> amounts(const std::string& doc) {
    std::vector<double> out;
    for (std::size_t i = doc.find('$'); i != std::string::npos; i = doc.find('$', i + 1)) {
        double v = 0;
        if (std::sscanf(doc.c_str() + i + 1, "%lf", &v) == 1) out.push_back(v);
    }
    return out;
}

}  // namespace rbe_detail

/// Retrieves top-k documents and composes an answer from them alone. The
/// evidence is capped at k, so counts over many episodes come out low.
inline RbeAnswer answer_rbe(const Index& index, const std::string& question, const RbeConfig& config = {}) {
    using K = QuestionCategory::Kind;
    RbeAnswer out;
    out.sources = index.retrieve(question, config);
    if (out.sources.empty()) {
        out.text = kNoRelevantRecords;
        return out;
    }
    std::vector<const Document*> docs;
    for (const auto& h : out.sources) docs.push_back(index.find(h.doc_id));

    auto match = classify(question);
    if (!match) {
        out.text = "Based on my records: " + docs.front()->text;
        return out;
    }
    const Translation t = instantiate(*match);
    std::vector<std::string> needles;
    for (const auto& [slot, value] : match->slots)
        if (slot != "date") needles.push_back(value);
    if (t.category.date) needles.push_back(t.category.date->long_form());

    std::vector<const Document*> matching;
    for (const Document* d : docs)
        if (rbe_detail::mentions_all(d->text, needles)) matching.push_back(d);

    const auto& cat = t.category;
    switch (cat.kind) {
        case K::CountTimes:
        case K::NestedCompare:
            out.text = matching.empty() ? "I found no matching records."
                                        : "I " + cat.phrase + " " + std::to_string(matching.size()) +
                                              (matching.size() == 1 ? " time." : " times.");
            break;
        case K::DidEver:
            out.text = matching.empty() ? "No, I never " + cat.phrase + "."
                                        : "Yes, I " + cat.phrase + " " + std::to_string(matching.size()) +
                                              (matching.size() == 1 ? " time." : " times.");
            break;
        case K::LastTime:
        case K::FirstTime: {
            std::optional<Date> best;
            for (const Document* d : matching)
                if (auto date = rbe_detail::document_date(d->text))
                    if (!best || (cat.kind == K::LastTime ? *date > *best : *date < *best)) best = date;
            out.text = best ? std::string(cat.kind == K::LastTime ? "The last time I " : "The first time I ") +
                                  cat.phrase + " was on " + best->long_form() + "."
                            : "I found no matching records.";
            break;
        }
        case K::SumSpent: {
            double total = 0;
            for (const Document* d : matching)
                for (double a : rbe_detail::amounts(d->text)) total += a;
            out.text = matching.empty() ? "I found no matching records."
                                        : "I spent $" + render_money(Value(total)) + " " + cat.phrase + ".";
            break;
        }
        default: {
            const auto& use = matching.empty() ? docs : matching;
            out.text = "Based on my records: ";
            for (std::size_t i = 0; i < use.size(); ++i) out.text += (i ? " " : "") + use[i]->text;
            break;
        }
    }
    return out;
}

}  // namespace postview
