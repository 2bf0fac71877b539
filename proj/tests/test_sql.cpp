#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "postview/sql_analyzer.hpp"
#include "postview/sql_parser.hpp"
#include "postview/sql_printer.hpp"
#include "roundtrip.hpp"

using namespace postview;
using namespace postview::sql;
using namespace postview::testing;

namespace {

// Plain DP edit distance, case-folded, written independently of text.hpp.
std::size_t edit_distance(std::string a, std::string b) {
    for (auto& c : a) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto& c : b) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    return d[a.size()][b.size()];
}

Catalog chat_catalog() {
    Catalog c;
    c.register_view("daily_chat_log", "who I chatted with each day",
                    make_table("daily_chat_log",
                               {{"eid", ValueType::Text}, {"date", ValueType::Date}, {"friends", ValueType::Text},
                                {"topic", ValueType::Text}, {"duration_min", ValueType::Int}},
                               {"eid"}, {}));
    return c;
}

std::string squash(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

}  // namespace

TEST(Parse, AveryMaxQuery) {
    auto q = parse("SELECT MAX(date) FROM daily_chat_log WHERE friends LIKE '%Avery%'");
    ASSERT_EQ(q.select_items.size(), 1u);
    EXPECT_EQ(q.select_items[0].expr.kind, ExprKind::Agg);
    EXPECT_EQ(q.select_items[0].expr.agg, AggFn::Max);
    EXPECT_EQ(q.select_items[0].expr.args.at(0).column.name, "date");
    ASSERT_EQ(q.from.size(), 1u);
    EXPECT_EQ(q.from[0].view, "daily_chat_log");
    ASSERT_TRUE(q.where);
    EXPECT_EQ(q.where->kind, ExprKind::Like);
    EXPECT_EQ(q.where->args.at(0).column.name, "friends");
    EXPECT_EQ(q.where->args.at(1).literal, Value("%Avery%"));
}

TEST(Parse, TrivialProjection) {
    auto q = parse("SELECT a FROM t");
    ASSERT_EQ(q.select_items.size(), 1u);
    EXPECT_EQ(q.select_items[0].expr.kind, ExprKind::Column);
    EXPECT_FALSE(q.where);
    EXPECT_FALSE(q.distinct);
}

TEST(Parse, WindowFunctionUnsupported) {
    try {
        parse("SELECT OVER()");
        FAIL() << "expected an error";
    } catch (const SqlError& e) {
        EXPECT_EQ(e.kind(), SqlError::Kind::Unsupported);
        EXPECT_EQ(e.construct(), "OVER");
    }
}

TEST(Parse, SyntaxErrorsCarryPositionsInsideInput) {
    const std::vector<std::string> bad{"SELECT", "SELECT a FROM", "SELECT a FROM t WHERE", "SELECT a,, b FROM t",
                                       "SELECT a FROM t WHERE b = 'x", "SELECT * FORM t", "SELECT a FROM t LIMIT -1",
                                       "SELECT (a FROM t", "SELECT a FROM t\nWHERE a = = 1"};
    for (const auto& s : bad) {
        try {
            parse(s);
            ADD_FAILURE() << "parsed: " << s;
        } catch (const SqlError& e) {
            EXPECT_LE(e.offset(), s.size()) << s;
            EXPECT_GE(e.line(), 1u) << s;
        }
    }
    try {
        parse("SELECT a FROM t\nWHERE a = = 1");
    } catch (const SqlError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Parse, KeywordsCaseInsensitiveAndStringEscapes) {
    auto a = parse("select a from t where b = 'it''s'");
    auto b = parse("SELECT a FROM t WHERE b = 'it''s'");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.where->args.at(1).literal, Value("it's"));
    EXPECT_NE(print(a).find("'it''s'"), std::string::npos);
}

TEST(Parse, CloseEnoughIsAProduction) {
    auto q = parse("SELECT eid FROM daily_chat_log WHERE CLOSE_ENOUGH('%Avery%', friends)");
    EXPECT_EQ(q.where->kind, ExprKind::CloseEnough);
    EXPECT_THROW(parse("SELECT eid FROM t WHERE CLOSE_ENOUGH(friends, '%Avery%')"), SqlError);
}

TEST(Parse, IsNullPredicates) {
    auto q = parse("SELECT a FROM t WHERE a IS NULL AND b IS NOT NULL");
    ASSERT_EQ(q.where->kind, ExprKind::And);
    EXPECT_EQ(q.where->args[0].kind, ExprKind::IsNull);
    EXPECT_EQ(q.where->args[1].kind, ExprKind::Not);
    EXPECT_EQ(q.where->args[1].args[0].kind, ExprKind::IsNull);
    EXPECT_EQ(print(q), "SELECT a FROM t WHERE a IS NULL AND b IS NOT NULL");
    EXPECT_THROW(parse("SELECT a FROM t WHERE a IS 3"), SqlError);
}

TEST(Print, AveryQueryCanonical) {
    const std::string text = "SELECT MAX(date) FROM daily_chat_log WHERE friends LIKE '%Avery%'";
    EXPECT_EQ(squash(print(parse(text))), squash(text));
}

TEST(Print, RoundTripOnGeneratedQueries) {
    RoundTripReport rep = parser_round_trip(1000, 1);
    EXPECT_EQ(rep.queries, 1000u);
    for (const auto& f : rep.failures) ADD_FAILURE() << f;
}

TEST(Validate, MisspelledColumnCandidates) {
    Catalog c = chat_catalog();
    auto diags = validate(parse("SELECT date FROM daily_chat_log WHERE freinds = 'Avery'"), c);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].kind, Diagnostic::Kind::UnknownColumn);
    EXPECT_EQ(diags[0].name, "freinds");
    // Oracle: the nearest column by edit distance.
    std::size_t best = 1000;
    std::string best_name;
    for (const auto& col : c.get("daily_chat_log").table.schema.columns) {
        auto d = edit_distance("freinds", col.name);
        if (d < best) best = d, best_name = col.name;
    }
    ASSERT_FALSE(diags[0].candidates.empty());
    EXPECT_EQ(diags[0].candidates[0].name, best_name);
    EXPECT_EQ(diags[0].candidates[0].distance, best);
    EXPECT_EQ(best_name, "friends");
    EXPECT_EQ(best, 2u);
}

TEST(Validate, CleanQueryHasNoDiagnostics) {
    EXPECT_TRUE(validate(parse("SELECT MAX(date) FROM daily_chat_log WHERE friends LIKE '%Avery%'"), chat_catalog()).empty());
}

TEST(Validate, AggregateMisuseAndUnknownView) {
    Catalog c = chat_catalog();
    auto d1 = validate(parse("SELECT friends, COUNT(*) FROM daily_chat_log"), c);
    ASSERT_FALSE(d1.empty());
    EXPECT_EQ(d1[0].kind, Diagnostic::Kind::AggregateMisuse);
    auto d2 = validate(parse("SELECT a FROM nowhere"), c);
    ASSERT_FALSE(d2.empty());
    EXPECT_EQ(d2[0].kind, Diagnostic::Kind::UnknownView);
    auto d3 = validate(parse("SELECT eid FROM daily_chat_log WHERE COUNT(*) > 1"), c);
    ASSERT_FALSE(d3.empty());
    EXPECT_EQ(d3[0].kind, Diagnostic::Kind::AggregateMisuse);
    auto d4 = validate(parse("SELECT MAX(COUNT(*)) FROM daily_chat_log"), c);
    ASSERT_FALSE(d4.empty());
    EXPECT_EQ(d4[0].kind, Diagnostic::Kind::AggregateMisuse);
}

TEST(Validate, GeneratedQueriesValidate) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 300; ++i) {
        SmallWorld w = random_world(rng);
        auto q = QueryGen(rng()).query();
        EXPECT_TRUE(validate(q, w.catalog()).empty()) << print(q);
    }
}
