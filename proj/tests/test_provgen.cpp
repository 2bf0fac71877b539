#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "postview/postview.hpp"
#include "random_query.hpp"

using namespace postview;
using namespace postview::testing;

namespace {

const Catalog& demo() {
    static const Catalog c = load_manifest(std::string(POSTVIEW_SOURCE_DIR) + "/data/demo/manifest.json").catalog;
    return c;
}

const char* kRelaxedAvery =
    "SELECT MAX(date) FROM daily_chat_log WHERE (friends LIKE '%Avery%' OR CLOSE_ENOUGH('%Avery%', friends))";

ReconciliationReport reconcile_query(const sql::QueryAst& q, const Catalog& c) {
    auto gen = generate(q, c);
    return reconcile(eval(q, c), gen, execute_prov(c, gen.queries));
}

}  // namespace

TEST(Generate, AveryQ0Verbatim) {
    auto gen = generate(sql::parse(kRelaxedAvery), demo());
    ASSERT_EQ(gen.queries.size(), 1u);
    EXPECT_EQ(gen.queries[0].label, "q0");
    EXPECT_EQ(gen.queries[0].target_view, "daily_chat_log");
    EXPECT_EQ(sql::print(gen.queries[0].query),
              "SELECT eid FROM daily_chat_log WHERE (friends LIKE '%Avery%' OR CLOSE_ENOUGH('%Avery%', friends))");
    EXPECT_TRUE(gen.warnings.empty());
}

TEST(Generate, NegatedBlockSkippedWithWarning) {
    auto gen = generate(sql::parse("SELECT COUNT(*) FROM trips WHERE NOT EXISTS (SELECT eid FROM daily_chat_log "
                                   "WHERE daily_chat_log.date = trips.date)"),
                        demo());
    EXPECT_TRUE(gen.queries.empty());
    EXPECT_EQ(gen.warnings.size(), 1u);
}

TEST(Generate, NestedAverageGivesOuterAndInner) {
    auto q = sql::parse("SELECT AVG(duration_min) FROM (SELECT duration_min, eid FROM daily_chat_log WHERE "
                        "friends LIKE '%Avery%') AS x");
    auto gen = generate(q, demo());
    ASSERT_EQ(gen.queries.size(), 2u);
    EXPECT_EQ(gen.queries[0].label, "q0");
    EXPECT_EQ(gen.queries[1].label, "q1");
    for (const auto& pq : gen.queries) {
        EXPECT_EQ(pq.target_view, "daily_chat_log");
        EXPECT_EQ(sql::parse(sql::print(pq.query)), pq.query);
        EXPECT_TRUE(sql::validate(pq.query, demo()).empty()) << sql::print(pq.query);
    }
    auto rep = reconcile(eval(q, demo()), gen, execute_prov(demo(), gen.queries));
    EXPECT_TRUE(rep.equal) << rep.verdict();
}

TEST(Generate, HavingConstrainsToSurvivingGroups) {
    auto q = sql::parse("SELECT friends, COUNT(*) FROM daily_chat_log GROUP BY friends HAVING COUNT(*) >= 3");
    auto gen = generate(q, demo());
    ASSERT_EQ(gen.queries.size(), 1u);
    EXPECT_NE(sql::print(gen.queries[0].query).find("friends IN (SELECT friends AS pv_g0 FROM daily_chat_log"), std::string::npos)
        << sql::print(gen.queries[0].query);
    auto t = eval(q, demo());
    ASSERT_FALSE(t.rows.empty());
    auto rep = reconcile(t, gen, execute_prov(demo(), gen.queries));
    EXPECT_TRUE(rep.equal) << rep.verdict();
}

TEST(Generate, NullGroupKeysSurviveHaving) {
    SmallWorld w;
    w.r = {{Value("r1"), Value(), Value("x")}, {Value("r2"), Value(), Value("y")}, {Value("r3"), Value(1), Value("x")}};
    w.s = {{Value("s1"), Value(1), Value("x")}};
    Catalog c = w.catalog();
    auto q = sql::parse("SELECT a, COUNT(*) FROM R GROUP BY a HAVING COUNT(*) >= 2");
    auto t = eval(q, c);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_TRUE(t.rows[0].values[0].is_null());
    auto gen = generate(q, c);
    auto tuples = execute_prov(c, gen.queries);
    ASSERT_EQ(tuples.size(), 2u);
    EXPECT_EQ(tuples[0].tuple, tid("R", "r1"));
    EXPECT_EQ(tuples[1].tuple, tid("R", "r2"));
    EXPECT_TRUE(reconcile(t, gen, tuples).equal);
}

TEST(Generate, CrossProductEmitsOneQueryPerView) {
    auto q = sql::parse("SELECT trips.date FROM trips, daily_chat_log WHERE trips.date = daily_chat_log.date AND "
                        "trips.destination LIKE '%Paris%'");
    auto gen = generate(q, demo());
    ASSERT_EQ(gen.queries.size(), 2u);
    EXPECT_EQ(gen.queries[0].target_view, "trips");
    EXPECT_EQ(gen.queries[1].target_view, "daily_chat_log");
    auto rep = reconcile(eval(q, demo()), gen, execute_prov(demo(), gen.queries));
    EXPECT_TRUE(rep.equal) << rep.verdict();
}

TEST(Generate, DeterministicLabels) {
    auto q = sql::parse("SELECT COUNT(*) FROM daily_chat_log WHERE date IN (SELECT date FROM trips WHERE nights > 3)");
    auto a = generate(q, demo()), b = generate(q, demo());
    ASSERT_EQ(a.queries.size(), b.queries.size());
    for (std::size_t i = 0; i < a.queries.size(); ++i) {
        EXPECT_EQ(a.queries[i].label, "q" + std::to_string(i));
        EXPECT_EQ(a.queries[i].query, b.queries[i].query);
    }
}

TEST(ExecuteProv, AveryFourTuples) {
    auto gen = generate(sql::parse(kRelaxedAvery), demo());
    auto tuples = execute_prov(demo(), gen.queries);
    std::vector<ProvTuple> expected;
    for (const char* k : {"e152", "e154", "e169", "e176"}) expected.push_back({"q0", tid("daily_chat_log", k)});
    EXPECT_EQ(tuples, expected);
}

TEST(ExecuteProv, NoMatchesIsEmpty) {
    auto gen = generate(sql::parse("SELECT MAX(date) FROM daily_chat_log WHERE friends LIKE '%Zebediah%'"), demo());
    EXPECT_TRUE(execute_prov(demo(), gen.queries).empty());
}

TEST(ExecuteProv, GroupedByLabel) {
    auto gen = generate(sql::parse("SELECT COUNT(*) FROM daily_chat_log WHERE date IN (SELECT date FROM trips)"), demo());
    ASSERT_EQ(gen.queries.size(), 2u);
    auto tuples = execute_prov(demo(), gen.queries);
    bool seen_q1 = false;
    for (const auto& t : tuples) {
        if (t.label == "q1") seen_q1 = true;
        if (seen_q1) EXPECT_EQ(t.label, "q1");
    }
}

TEST(Reconcile, AveryEqual) {
    auto rep = reconcile_query(sql::parse(kRelaxedAvery), demo());
    EXPECT_TRUE(rep.equal);
    EXPECT_FALSE(rep.partial);
    EXPECT_TRUE(rep.engine_only.empty());
    EXPECT_TRUE(rep.prov_only.empty());
    EXPECT_EQ(rep.verdict(), "equal");
}

TEST(Reconcile, NegationMarkedPartial) {
    auto q = sql::parse("SELECT COUNT(*) FROM trips WHERE NOT EXISTS (SELECT eid FROM daily_chat_log)");
    auto gen = generate(q, demo());
    AnnotatedTable empty;
    auto rep = reconcile(empty, gen, execute_prov(demo(), gen.queries));
    EXPECT_TRUE(rep.partial);
    EXPECT_NE(rep.verdict().find("partial"), std::string::npos);
}

TEST(Reconcile, InjectedMismatchDetected) {
    auto q = sql::parse(kRelaxedAvery);
    auto gen = generate(q, demo());
    gen.queries[0].query.where = sql::parse("SELECT eid FROM daily_chat_log WHERE friends LIKE '%Jordan%'").where;
    auto rep = reconcile(eval(q, demo()), gen, execute_prov(demo(), gen.queries));
    EXPECT_FALSE(rep.equal);
    EXPECT_FALSE(rep.engine_only.empty());
    EXPECT_FALSE(rep.prov_only.empty());
    EXPECT_EQ(rep.verdict(), "mismatch");
}

TEST(Reconcile, EquivalenceOnRandomUncorrelatedQueries) {
    std::mt19937_64 rng(31);
    QueryGenOptions o;
    o.having = true;
    int equal = 0, partial = 0;
    for (int i = 0; i < 400; ++i) {
        SmallWorld w = random_world(rng);
        Catalog c = w.catalog();
        auto q = QueryGen(rng(), o).query();
        auto gen = generate(q, c);
        for (const auto& pq : gen.queries) EXPECT_TRUE(sql::validate(pq.query, c).empty()) << sql::print(pq.query);
        auto rep = reconcile(eval(q, c), gen, execute_prov(c, gen.queries));
        if (rep.partial) {
            ++partial;
            continue;
        }
        EXPECT_TRUE(rep.equal) << sql::print(q);
        ++equal;
    }
    EXPECT_GT(equal, 300);
}

TEST(Reconcile, EquivalenceWithLimit) {
    std::mt19937_64 rng(32);
    QueryGenOptions o;
    o.having = true;
    o.limit = true;
    int equal = 0;
    for (int i = 0; i < 400; ++i) {
        SmallWorld w = random_world(rng);
        Catalog c = w.catalog();
        auto q = QueryGen(rng(), o).query();
        auto gen = generate(q, c);
        auto rep = reconcile(eval(q, c), gen, execute_prov(c, gen.queries));
        if (rep.partial) continue;
        EXPECT_TRUE(rep.equal) << sql::print(q);
        ++equal;
    }
    EXPECT_GT(equal, 300);
}
