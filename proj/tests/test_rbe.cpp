#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "postview/catalog.hpp"
#include "postview/rbe.hpp"

using namespace postview;
namespace fs = std::filesystem;

namespace {

std::vector<Document> toy() {
    return {{"d1", "avery chat avery"}, {"d2", "trip paris"}, {"d3", "avery trip to paris today"}};
}

double score_of(const std::vector<Hit>& hits, const std::string& id) {
    for (const auto& h : hits)
        if (h.doc_id == id) return h.score;
    return 0.0;
}

// Brute-force BM25 straight from the definition, no inverted index.
double brute_bm25(const std::vector<Document>& docs, const std::string& id, const std::string& query, double k1 = 1.2,
                  double b = 0.75) {
    auto toks = [](const std::string& s) { return text::alnum_tokens(s); };
    double avg = 0;
    for (const auto& d : docs) avg += toks(d.text).size();
    avg /= docs.size();
    auto q = toks(query);
    std::set<std::string> terms(q.begin(), q.end());
    const Document* doc = nullptr;
    for (const auto& d : docs)
        if (d.doc_id == id) doc = &d;
    auto words = toks(doc->text);
    double s = 0;
    for (const auto& t : terms) {
        double df = 0;
        for (const auto& d : docs) {
            auto w = toks(d.text);
            df += std::find(w.begin(), w.end(), t) != w.end();
        }
        double tf = std::count(words.begin(), words.end(), t);
        if (tf == 0) continue;
        double idf = std::log(1 + (docs.size() - df + 0.5) / (df + 0.5));
        s += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * words.size() / avg));
    }
    return s;
}

std::string chat_doc(int day, const std::string& who) {
    return "On January " + std::to_string(day) + ", 2022, I chatted with " + who + " about the weather.";
}

fs::path temp_path(const std::string& name) {
    return fs::temp_directory_path() / ("postview_rbe_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Index, ToyStatistics) {
    Index idx = build_index({{"a", "one"}, {"b", "two"}, {"c", "one"}});
    EXPECT_EQ(idx.size(), 3u);
    EXPECT_LE(idx.vocabulary_size(), 3u);
    EXPECT_DOUBLE_EQ(idx.average_length(), 1.0);
    EXPECT_EQ(idx.document_frequency("one"), 2u);
}

TEST(Index, DuplicateIdAndEmptyTextRejected) {
    EXPECT_THROW(build_index({{"a", "x"}, {"a", "y"}}), RbeError);
    EXPECT_THROW(build_index({{"a", ""}}), RbeError);
}

TEST(Retrieve, OnlyMatchFirst) {
    Index idx = build_index({{"d1", "avery chat"}, {"d2", "trip paris"}});
    auto hits = idx.retrieve("avery");
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].doc_id, "d1");
}

TEST(Retrieve, HandComputedScores) {
    Index idx = build_index(toy());
    RbeConfig all;
    all.k = 10;
    // Frozen from a hand calculation: N=3, avgdl=10/3, idf(avery)=idf(paris)=ln 1.6.
    auto h = idx.retrieve("avery paris", all);
    EXPECT_NEAR(score_of(h, "d1"), 0.664956903112938, 1e-9);
    EXPECT_NEAR(score_of(h, "d2"), 0.561960861054684, 1e-9);
    EXPECT_NEAR(score_of(h, "d3"), 0.7803833844080139, 1e-9);
    EXPECT_EQ(h[0].doc_id, "d3");
    h = idx.retrieve("chat today", all);
    EXPECT_NEAR(score_of(h, "d1"), 1.0226655718605677, 1e-9);
    EXPECT_NEAR(score_of(h, "d3"), 0.8142733421229427, 1e-9);
    h = idx.retrieve("trip", all);
    EXPECT_NEAR(score_of(h, "d2"), 0.561960861054684, 1e-9);
    EXPECT_NEAR(score_of(h, "d3"), 0.39019169220400696, 1e-9);
    EXPECT_EQ(h.size(), 2u);
}

TEST(Retrieve, AgreesWithBruteForceOnRandomCorpora) {
    std::mt19937_64 rng(5);
    const std::vector<std::string> vocab{"avery", "paris", "hike", "vet", "milk", "chat", "trip", "the", "on", "2022"};
    for (int round = 0; round < 50; ++round) {
        std::vector<Document> docs;
        int n = 2 + rng() % 12;
        for (int i = 0; i < n; ++i) {
            std::string t;
            int len = 1 + rng() % 9;
            for (int j = 0; j < len; ++j) t += vocab[rng() % vocab.size()] + " ";
            docs.push_back({"d" + std::to_string(i), t});
        }
        std::string q = vocab[rng() % vocab.size()] + " " + vocab[rng() % vocab.size()];
        Index idx = build_index(docs);
        RbeConfig all;
        all.k = 100;
        auto hits = idx.retrieve(q, all);
        for (const auto& d : docs) EXPECT_NEAR(score_of(hits, d.doc_id), brute_bm25(docs, d.doc_id, q), 1e-9) << q;
    }
}

TEST(Retrieve, EmptyAndUnknownQueries) {
    Index idx = build_index(toy());
    EXPECT_TRUE(idx.retrieve("").empty());
    EXPECT_TRUE(idx.retrieve("of the and").empty());
}

TEST(Retrieve, TopKWithTiesByDocId) {
    std::vector<Document> docs;
    for (int i = 9; i >= 0; --i) docs.push_back({"e" + std::to_string(i), "avery"});
    auto hits = build_index(docs).retrieve("avery");
    ASSERT_EQ(hits.size(), 4u);
    EXPECT_EQ(hits[0].doc_id, "e0");
    EXPECT_EQ(hits[3].doc_id, "e3");
}

TEST(Retrieve, AddingQueryTermNeverLowersScore) {
    std::mt19937_64 rng(9);
    const std::vector<std::string> vocab{"avery", "paris", "hike", "vet", "milk", "chat"};
    RbeConfig all;
    all.k = 100;
    for (int round = 0; round < 200; ++round) {
        std::vector<Document> docs;
        for (int i = 0; i < 6; ++i) {
            std::string t;
            for (int j = 0, len = 1 + rng() % 6; j < len; ++j) t += vocab[rng() % vocab.size()] + " ";
            docs.push_back({"d" + std::to_string(i), t});
        }
        const std::string term = vocab[rng() % vocab.size()];
        const std::size_t target = rng() % docs.size();
        if (build_index(docs).document_frequency(term) == 0) continue;
        double before = score_of(build_index(docs).retrieve(term, all), docs[target].doc_id);
        docs[target].text += " " + term;
        double after = score_of(build_index(docs).retrieve(term, all), docs[target].doc_id);
        EXPECT_GE(after, before - 1e-12) << term;
    }
}

TEST(Index, PersistenceRoundTrip) {
    Index idx = build_index(toy());
    auto path = temp_path("index.json");
    idx.save(path);
    Index back = Index::load(path);
    fs::remove(path);
    EXPECT_EQ(back.to_json(), idx.to_json());
    for (const char* q : {"avery", "avery paris", "today"}) {
        auto a = idx.retrieve(q), b = back.retrieve(q);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].doc_id, b[i].doc_id);
            EXPECT_EQ(a[i].score, b[i].score);
        }
    }
    EXPECT_THROW(Index::from_json({{"format", "other"}}), RbeError);
}

TEST(Index, DeterministicBuilds) {
    std::vector<Document> docs;
    for (int i = 0; i < 10000; ++i) docs.push_back({"e" + std::to_string(i), chat_doc(1 + i % 28, i % 3 ? "Jordan" : "Avery")});
    Index a = build_index(docs), b = build_index(docs);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    auto ha = a.retrieve("Avery weather"), hb = b.retrieve("Avery weather");
    ASSERT_EQ(ha.size(), hb.size());
    for (std::size_t i = 0; i < ha.size(); ++i) EXPECT_EQ(ha[i].doc_id, hb[i].doc_id);
}

TEST(Answer, CountCappedAtK) {
    std::vector<Document> docs;
    for (int i = 1; i <= 9; ++i) docs.push_back({"a" + std::to_string(i), chat_doc(i, "Avery")});
    for (int i = 10; i <= 12; ++i) docs.push_back({"j" + std::to_string(i), chat_doc(i, "Jordan")});
    Index idx = build_index(docs);
    auto ans = answer_rbe(idx, "How many times did I chat with Avery?");
    ASSERT_EQ(ans.sources.size(), 4u);
    EXPECT_EQ(ans.text, "I chatted with Avery 4 times.");
    for (const auto& s : ans.sources) EXPECT_EQ(s.doc_id[0], 'a');
}

TEST(Answer, LastTimeFromRetrievedDocs) {
    Index idx = build_index({{"e1", chat_doc(3, "Avery")}, {"e2", chat_doc(17, "Avery")}, {"e3", chat_doc(20, "Jordan")},
                             {"e4", "On February 2, 2022, I bought milk at Costco for $3.50."}});
    auto ans = answer_rbe(idx, "When was the last time I chatted with Avery?");
    EXPECT_EQ(ans.text, "The last time I chatted with Avery was on January 17, 2022.");
}

TEST(Answer, NoHits) {
    auto ans = answer_rbe(build_index(toy()), "zebra quokka");
    EXPECT_EQ(ans.text, kNoRelevantRecords);
    EXPECT_TRUE(ans.sources.empty());
}

TEST(Answer, SourcesInRankOrder) {
    Index idx = build_index(toy());
    auto ans = answer_rbe(idx, "avery paris today");
    auto hits = idx.retrieve("avery paris today");
    ASSERT_EQ(ans.sources.size(), hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(ans.sources[i].doc_id, hits[i].doc_id);
    for (std::size_t i = 1; i < ans.sources.size(); ++i) EXPECT_GE(ans.sources[i - 1].score, ans.sources[i].score);
}

TEST(Documents, LoadJsonLines) {
    auto path = temp_path("docs.jsonl");
    std::ofstream(path) << R"({"doc_id": "e1", "text": "On January 1, 2022, hi"})" << "\n\n"
                        << R"({"doc_id": "e2", "text": "there"})" << "\n";
    auto docs = load_documents(path);
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[1].doc_id, "e2");
    std::ofstream(path) << R"({"doc_id": "e1"})" << "\n";
    try {
        load_documents(path);
        ADD_FAILURE() << "expected an error";
    } catch (const RbeError& e) {
        EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos) << e.what();
    }
    fs::remove(path);
    EXPECT_THROW(load_documents(temp_path("missing.jsonl")), RbeError);
}

TEST(Documents, DemoCorpusIndexesAndAnswers) {
    auto info = load_manifest(std::string(POSTVIEW_SOURCE_DIR) + "/data/demo/manifest.json");
    auto docs = load_documents(std::string(POSTVIEW_SOURCE_DIR) + "/data/demo/documents.jsonl");
    Index idx = build_index(docs);
    EXPECT_GT(idx.size(), 100u);
    auto ans = answer_rbe(idx, "When was the last time I chatted with Avery?");
    EXPECT_EQ(ans.sources.size(), 4u);
    EXPECT_FALSE(documents_from_catalog(info.catalog).empty());
}
