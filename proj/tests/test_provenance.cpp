#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "postview/provenance.hpp"
#include "semiring.hpp"

using namespace postview;
using namespace postview::testing;

namespace {
Polynomial v(const char* k) { return Polynomial::var(tid("R", k)); }
}  // namespace

TEST(Polynomial, SemiringLaws) {
    LawReport rep = semiring_laws(1200, 42);
    EXPECT_GE(rep.cases, 10000u);
    for (const auto& f : rep.failures) ADD_FAILURE() << f;
}

TEST(Polynomial, ZeroAndOne) {
    EXPECT_TRUE(Polynomial::zero().is_zero());
    EXPECT_TRUE(Polynomial::one().is_one());
    EXPECT_EQ(Polynomial::zero().to_string(), "0");
    EXPECT_EQ(Polynomial::one().to_string(), "1");
    EXPECT_EQ((Polynomial::one() + Polynomial::one()).to_string(), "2");
}

TEST(Polynomial, AdditionIsMultisetUnion) {
    auto p = v("r1") + v("r1") + v("r2");
    EXPECT_EQ(p.monomials().size(), 3u);
    EXPECT_EQ(p.to_string(), "2*R('r1') + R('r2')");
}

TEST(Polynomial, MultiplicationConcatenatesMonomials) {
    auto p = (v("r1") + v("r2")) * v("r3");
    EXPECT_EQ(p, v("r1") * v("r3") + v("r2") * v("r3"));
    EXPECT_EQ((v("r1") * v("r1")).monomials().front().size(), 2u);
}

TEST(Polynomial, UnionWithCapsMultiplicity) {
    auto p = v("r1") + v("r2");
    EXPECT_EQ(p.union_with(p), p);
    EXPECT_EQ(p.union_with(v("r3")), p + v("r3"));
}

TEST(Why, Definition) {
    EXPECT_EQ(why_of(v("r1") + v("r2")), (WhySet{{tid("R", "r1")}, {tid("R", "r2")}}));
    EXPECT_EQ(why_of(v("r1") * v("r1")), (WhySet{{tid("R", "r1")}}));
    EXPECT_EQ(why_of(v("r1") + v("r1") * v("r2")), (WhySet{{tid("R", "r1")}}));
    EXPECT_TRUE(why_of(Polynomial::zero()).empty());
    EXPECT_EQ(why_of(Polynomial::one()), (WhySet{{}}));
}

TEST(Why, MinimalityProperty) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        auto p = random_polynomial(rng);
        auto w = why_of(p);
        for (const auto& a : w)
            for (const auto& b : w)
                if (a != b) EXPECT_FALSE(std::includes(a.begin(), a.end(), b.begin(), b.end())) << p.to_string();
        // Every monomial's support contains some witness.
        for (const auto& m : p.monomials()) {
            TupleSet s(m.begin(), m.end());
            bool covered = false;
            for (const auto& x : w) covered |= std::includes(s.begin(), s.end(), x.begin(), x.end());
            EXPECT_TRUE(covered) << p.to_string();
        }
    }
}

TEST(Polynomial, TupleIdRendering) {
    EXPECT_EQ(tid("daily_chat_log", "e152").to_string(), "daily_chat_log('e152')");
}
