// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail C6,...] [--skip-full-scale]
//
// Exit status is 0 iff the set of failing criteria equals the expected set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "postview/bench/grader.hpp"
#include "postview/bench/qa.hpp"
#include "postview/bench/runner.hpp"
#include "postview/bench/timeline.hpp"
#include "postview/postview.hpp"
#include "roundtrip.hpp"
#include "semiring.hpp"
#include "soundness.hpp"

using namespace postview;
using namespace postview::bench;
using namespace postview::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> info;
};

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string squash(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

Outcome c1_transcript() {
    const auto t0 = Clock::now();
    auto m = load_manifest(std::string(POSTVIEW_SOURCE_DIR) + "/data/demo/manifest.json");
    Index index = build_index(load_documents(*m.documents));
    PipelineConfig cfg;
    cfg.provenance = true;
    Answer a = ask("When was the last time I chatted with Avery?", m.catalog, index, cfg);
    const double secs = seconds_since(t0);

    std::vector<std::string> bad;
    if (!a.sql || squash(a.sql->raw) != squash("SELECT MAX(date) FROM daily_chat_log WHERE friends LIKE '%Avery%'"))
        bad.push_back("raw SQL");
    if (!a.sql || a.sql->relaxed.find("CLOSE_ENOUGH('%Avery%', friends)") == std::string::npos) bad.push_back("relaxed SQL");
    if (!a.result_table || a.result_table->rows.size() != 1 || a.result_table->rows[0].values.size() != 1 ||
        a.result_table->rows[0].values[0].to_string() != "2022/12/26")
        bad.push_back("result");
    if (a.text != "The last time I chatted with Avery was on December 26, 2022.") bad.push_back("verbalization");
    std::vector<ProvTuple> expected;
    for (const char* k : {"e152", "e154", "e169", "e176"}) expected.push_back({"q0", tid("daily_chat_log", k)});
    if (!a.provenance || a.provenance->tuples != expected) bad.push_back("provenance");
    if (secs >= 1.0) bad.push_back("runtime");

    Outcome o;
    o.pass = bad.empty();
    o.detail = (bad.empty() ? "transcript exact" : "mismatch in " + text::join(bad, ", ")) + ", " + fmt(secs) + " s";
    return o;
}

Outcome c2_soundness() {
    const auto t0 = Clock::now();
    SoundnessReport rep = soundness_suite(250, 2024);
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = rep.failures.empty() && rep.queries >= 200 && secs < 120;
    o.detail = std::to_string(rep.queries) + " queries, " + std::to_string(rep.rows) + " rows, " +
               std::to_string(rep.witnesses) + " witnesses, " + std::to_string(rep.subset_evals) + " subset evaluations, " +
               std::to_string(rep.failures.size()) + " failures, " + fmt(secs, 1) + " s";
    for (std::size_t i = 0; i < rep.failures.size() && i < 5; ++i) o.info.push_back(rep.failures[i]);
    return o;
}

Outcome c3_route_equivalence() {
    std::size_t vbe = 0, equal = 0, partial = 0;
    std::vector<std::string> misses;
    PipelineConfig cfg;
    cfg.provenance = true;
    for (std::uint64_t seed : {7u, 11u, 13u}) {
        const Timeline t = generate_timeline(SizeClass::S, seed, 0.1);
        const TimelineData data = build_views(t);
        const Index index = build_index(data.documents);
        for (const auto& item : generate_qa(t, seed)) {
            Answer a = ask(item.question, data.views, index, cfg);
            if (!a.is_vbe()) continue;
            ++vbe;
            if (!a.provenance || a.provenance->partial) {
                ++partial;
                misses.push_back("partial: " + item.question);
            } else if (a.provenance->reconciliation.equal) {
                ++equal;
            } else {
                misses.push_back("mismatch: " + item.question);
            }
        }
    }
    Outcome o;
    o.pass = vbe > 0 && equal == vbe;
    o.detail = std::to_string(equal) + "/" + std::to_string(vbe) + " VBE queries reconcile equal (S, scale 0.1, seeds 7/11/13)";
    for (std::size_t i = 0; i < misses.size() && i < 5; ++i) o.info.push_back(misses[i]);
    return o;
}

Outcome c4_semiring() {
    LawReport rep = semiring_laws(1200, 42);
    Outcome o;
    o.pass = rep.cases >= 10000 && rep.failures.empty();
    o.detail = std::to_string(rep.cases) + " cases, " + std::to_string(rep.failures.size()) + " failures";
    for (std::size_t i = 0; i < rep.failures.size() && i < 5; ++i) o.info.push_back(rep.failures[i]);
    return o;
}

Outcome c5_round_trip() {
    RoundTripReport rep = parser_round_trip(1000, 1);
    Outcome o;
    o.pass = rep.queries == 1000 && rep.failures.empty();
    o.detail = std::to_string(rep.queries) + " queries, " + std::to_string(rep.failures.size()) + " failures";
    for (std::size_t i = 0; i < rep.failures.size() && i < 5; ++i) o.info.push_back(rep.failures[i]);
    return o;
}

double range_of(const Report& r, EngineKind e) {
    double lo = 6, hi = 0;
    for (SizeClass s : r.config.sizes) {
        lo = std::min(lo, r.mean(s, e));
        hi = std::max(hi, r.mean(s, e));
    }
    return hi - lo;
}

Outcome c6_directional(bool full_scale) {
    const auto t0 = Clock::now();
    Outcome o;
    bool vbe_rbe = true, sql_noviews = true, stable = true;
    for (std::uint64_t seed : {7u, 11u, 13u}) {
        BenchConfig cfg;
        cfg.seed = seed;
        cfg.scale = 0.1;
        Report r = run_benchmark(cfg);
        std::string line = "seed " + std::to_string(seed) + ":";
        for (SizeClass s : cfg.sizes) {
            line += std::string(" ") + to_string(s) + "[";
            for (EngineKind e : cfg.engines) {
                line += std::string(e == cfg.engines.front() ? "" : " ") + to_string(e) + "=" + fmt(r.mean(s, e), 2);
            }
            line += "]";
            vbe_rbe = vbe_rbe && r.mean(s, EngineKind::Vbe) > r.mean(s, EngineKind::Rbe);
            sql_noviews = sql_noviews && r.mean(s, EngineKind::SqlBaseline) > r.mean(s, EngineKind::NoViews);
        }
        const double rbe = range_of(r, EngineKind::Rbe), sqlb = range_of(r, EngineKind::SqlBaseline);
        stable = stable && rbe <= 1.0 * sqlb;
        line += " range RBE=" + fmt(rbe) + " SQLBaseline=" + fmt(sqlb);
        o.info.push_back(line);
    }
    const double secs = seconds_since(t0);
    o.pass = vbe_rbe && sql_noviews && stable && secs < 600;
    o.detail = std::string("VBE>RBE ") + (vbe_rbe ? "holds" : "fails") + ", SQLBaseline>NoViews " +
               (sql_noviews ? "holds" : "fails") + ", RBE range <= SQLBaseline range " + (stable ? "holds" : "fails") +
               ", " + fmt(secs, 1) + " s";

    if (full_scale) {
        BenchConfig cfg;
        cfg.seed = 7;
        cfg.scale = 1.0;
        cfg.engines = {EngineKind::Rbe, EngineKind::SqlBaseline};
        Report r = run_benchmark(cfg);
        o.info.push_back("informational, seed 7 at scale 1.0: range RBE=" + fmt(range_of(r, EngineKind::Rbe)) +
                         " SQLBaseline=" + fmt(range_of(r, EngineKind::SqlBaseline)));
    }
    return o;
}

Outcome c7_pushdown() {
    std::size_t checked = 0, passed = 0;
    std::vector<std::string> misses;
    for (SizeClass size : {SizeClass::S, SizeClass::M, SizeClass::L})
        for (std::uint64_t seed : {7u, 11u, 13u}) {
            const Timeline t = generate_timeline(size, seed, 0.1);
            const Catalog views = build_views(t).views;
            for (const auto& item : generate_qa(t, seed)) {
                if (!is_aggregate_category(item.category)) continue;
                ++checked;
                try {
                    if (aggregate_pushdown_check(translate_template(item.question, views.get(item.view)))) ++passed;
                    else misses.push_back(item.question);
                } catch (const std::exception& e) {
                    misses.push_back(item.question + ": " + e.what());
                }
            }
        }
    Outcome o;
    o.pass = checked > 0 && passed == checked;
    o.detail = std::to_string(passed) + "/" + std::to_string(checked) + " aggregate-category translations push down";
    for (std::size_t i = 0; i < misses.size() && i < 5; ++i) o.info.push_back(misses[i]);
    return o;
}

// Frozen from a hand calculation over {d1: "avery chat avery", d2: "trip
// paris", d3: "avery trip to paris today"}: N=3, avgdl=10/3.
Outcome c8_bm25() {
    const std::vector<Document> docs{{"d1", "avery chat avery"}, {"d2", "trip paris"}, {"d3", "avery trip to paris today"}};
    struct Case {
        const char* query;
        const char* doc;
        double score;
    };
    const Case cases[] = {
        {"avery paris", "d1", 0.664956903112938},  {"avery paris", "d2", 0.561960861054684},
        {"avery paris", "d3", 0.7803833844080139}, {"chat today", "d1", 1.0226655718605677},
        {"chat today", "d3", 0.8142733421229427},  {"trip", "d2", 0.561960861054684},
        {"trip", "d3", 0.39019169220400696},
    };
    RbeConfig all;
    all.k = 10;
    Index a = build_index(docs), b = build_index(docs);
    double worst = 0;
    for (const auto& c : cases) {
        double got = 0;
        for (const auto& h : a.retrieve(c.query, all))
            if (h.doc_id == c.doc) got = h.score;
        worst = std::max(worst, std::fabs(got - c.score));
    }
    bool deterministic = a.to_json().dump() == b.to_json().dump();
    for (const char* q : {"avery paris", "chat today", "trip", "paris avery today"}) {
        auto ha = a.retrieve(q), hb = b.retrieve(q);
        deterministic = deterministic && ha.size() == hb.size();
        for (std::size_t i = 0; deterministic && i < ha.size(); ++i)
            deterministic = ha[i].doc_id == hb[i].doc_id && ha[i].score == hb[i].score;
    }
    Outcome o;
    o.pass = worst <= 1e-9 && deterministic;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", worst);
    o.detail = "max |error| " + std::string(buf) + ", retrieval " + (deterministic ? "deterministic" : "nondeterministic");
    return o;
}

Outcome c9_generator() {
    const std::string a = serialize(generate_timeline(SizeClass::S, 7, 1.0));
    const std::string b = serialize(generate_timeline(SizeClass::S, 7, 1.0));
    const double mb = static_cast<double>(a.size()) / 1e6;
    Outcome o;
    o.pass = std::fabs(mb - 1.1) <= 0.15 * 1.1 && a == b;
    o.detail = "S at scale 1.0 = " + fmt(mb) + " MB (target 1.1 +/- 15%), regeneration " +
               (a == b ? "byte-identical" : "differs");
    return o;
}

Outcome c10_grader() {
    struct Case {
        const char* answer;
        const char* truth;
        int grade;
    };
    // Hand-traced through the rules 5 -> 1; same table as the unit tests.
    const Case cases[] = {
        {"2022/12/26", "2022/12/26", 5},
        {"The last time I chatted with Avery was on December 26, 2022.", "2022/12/26", 4},
        {"completely unrelated", "2022/12/26", 1},
        {"4", "4", 5},
        {"4.0", "4", 5},
        {"I chatted with Avery 4 times.", "9", 1},
        {"I chatted with Avery 9 times.", "9", 4},
        {"Yes, I traveled to Paris 2 times.", "yes", 4},
        {"No, I never traveled to Atlantis.", "no", 4},
        {"never", "never", 5},
        {"I found no matching records.", "never", 1},
        {"Avery, Jordan", "Avery, Jordan", 5},
        {"Jordan and Avery", "Avery, Jordan", 5},
        {"Avery", "Avery, Jordan", 3},
        {"Based on my records: Avery and Riley", "Avery, Jordan", 3},
        {"$12.50", "12.50", 5},
        {"I spent $45.00 on milk in 2022.", "45.00", 4},
        {"I spent $44.99 on milk in 2022.", "45.00", 1},
        {"Costco", "costco", 5},
        {"The store I shopped at most often is Costco.", "Costco", 4},
        {"Paris", "Paris, France", 3},
        {"hiking trip with Riley", "hiking", 4},
        {"On December 26 2022", "2022/12/26", 5},
        {"2022-12-26", "2022/12/26", 5},
        {"December 25, 2022", "2022/12/26", 1},
        {"I chatted with Avery about music", "Avery about music for hours", 3},
        {"Avery", "Avery music hours long", 2},
        {"We talked about music", "Avery music hours long", 2},
        {"", "4", 1},
        {"Yes", "no", 1},
    };
    std::size_t ok = 0;
    std::set<int> grades;
    Outcome o;
    for (const auto& c : cases) {
        const Grade g = grade(c.answer, c.truth);
        grades.insert(c.grade);
        if (g.value == c.grade) ++ok;
        else o.info.push_back(std::string("\"") + c.answer + "\" vs \"" + c.truth + "\": got " + std::to_string(g.value));
    }
    o.pass = ok == std::size(cases) && std::size(cases) == 30 && grades.size() == 5;
    o.detail = std::to_string(ok) + "/" + std::to_string(std::size(cases)) + " golden cases, " +
               std::to_string(grades.size()) + " grade levels covered";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<std::string> expected_fail;
    bool full_scale = true;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string c; std::getline(ss, c, ',');) expected_fail.insert(c);
        } else if (!std::strcmp(argv[i], "--skip-full-scale")) {
            full_scale = false;
        } else {
            std::cerr << "usage: acceptance [--expect-fail C6,...] [--skip-full-scale]\n";
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C1", c1_transcript},         {"C2", c2_soundness}, {"C3", c3_route_equivalence},
        {"C4", c4_semiring},           {"C5", c5_round_trip}, {"C6", [&] { return c6_directional(full_scale); }},
        {"C7", c7_pushdown},           {"C8", c8_bm25},      {"C9", c9_generator},
        {"C10", c10_grader},
    };
    std::set<std::string> failed;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) failed.insert(name);
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << "\n";
        for (const auto& line : o.info) std::cout << "     " << line << "\n";
        std::cout.flush();
    }
    std::cout << (criteria.size() - failed.size()) << "/" << criteria.size() << " criteria pass";
    if (!expected_fail.empty()) std::cout << " (expected to fail: " << text::join({expected_fail.begin(), expected_fail.end()}, ",") << ")";
    std::cout << "\n";
    return failed == expected_fail ? 0 : 1;
}
