#include <gtest/gtest.h>

#include <map>

#include "ifol/lattice.hpp"

using namespace ifol;

namespace {

// the two-case recursion evaluated literally, sup of the empty set being 0
long long pairing_by_recursion(long long b, long long g, std::map<std::pair<long long, long long>, long long>& memo) {
    auto key = std::make_pair(b, g);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    long long m = b < g ? g : b, s = 0;
    for (long long b2 = 0; b2 < m; ++b2)
        for (long long g2 = 0; g2 < m; ++g2) s = std::max(s, pairing_by_recursion(b2, g2, memo) + 1);
    long long v = b < g ? s + b : s + b + g;
    memo[key] = v;
    return v;
}

}  // namespace

TEST(Lattice, PairingMatchesRecursion) {
    std::map<std::pair<long long, long long>, long long> memo;
    std::set<long long> seen;
    for (long long b = 0; b <= 20; ++b)
        for (long long g = 0; g <= 20; ++g) {
            long long v = pairing(b, g);
            EXPECT_EQ(v, pairing_by_recursion(b, g, memo)) << b << "," << g;
            EXPECT_GE(v, g);
            EXPECT_TRUE(seen.insert(v).second);
            EXPECT_EQ(pairing_inverse(v), std::make_pair(b, g));
        }
    EXPECT_EQ(pairing(0, 0), 0);
    EXPECT_EQ(pairing(1, 0), 2);
    EXPECT_EQ(pairing(0, 2), 4);
    EXPECT_EQ(pairing(2, 2), 8);
    for (long long a = 0; a < 400; ++a) {
        auto [b, g] = pairing_inverse(a);
        EXPECT_EQ(pairing(b, g), a);
    }
}

TEST(Lattice, DistributivityVerdicts) {
    EXPECT_TRUE(check_distributivity(lattices::chain(2)).holds);
    EXPECT_TRUE(check_distributivity(lattices::diamond(), 2, 2).holds);
    auto m3 = check_distributivity(lattices::m3());
    EXPECT_FALSE(m3.holds);
    EXPECT_EQ(m3.law, "distributivity");
    ASSERT_FALSE(m3.witness.empty());
    // witness a, b0, b1 really violates a(b0 v b1) <= ab0 v ab1
    auto L = lattices::m3();
    std::vector<int> fam(m3.witness.begin() + 1, m3.witness.end());
    std::vector<int> ab;
    for (int b : fam) ab.push_back(L.meet(m3.witness[0], b));
    EXPECT_FALSE(L.leq(L.meet(m3.witness[0], L.join(fam)), L.join(ab)));
    EXPECT_FALSE(check_distributivity(lattices::n5()).holds);
}

TEST(Lattice, AllSmallLatticesAgreeWithTripleTest) {
    auto all = lattices::all_up_to(6);
    EXPECT_EQ(all.size(), 1u + 1 + 1 + 2 + 5 + 15);
    for (auto& L : all) {
        bool d = is_distributive(L);
        EXPECT_EQ(check_distributivity(L, 2, 2).holds, d);
        auto rep = representation_map(L);
        EXPECT_EQ(rep.injective, d);
        EXPECT_TRUE(rep.preserves_meets && rep.preserves_joins);
        for (auto& F : proper_filters(L)) {
            auto q = quotient_by_filter(L, F);
            // the congruence respects joins only under distributivity
            if (d) EXPECT_TRUE(q.is_morphism);
            for (int a = 0; a < L.n; ++a) EXPECT_EQ(q.theta[a] == q.K.top, F.contains(a));
            std::set<int> image(q.theta.begin(), q.theta.end());
            EXPECT_EQ(static_cast<int>(image.size()), q.K.n);
            if (d) EXPECT_TRUE(is_distributive(q.K));
        }
    }
}

TEST(Lattice, QuotientExamples) {
    auto c4 = lattices::chain(4);  // 0 < u < v < 1
    auto q = quotient_by_filter(c4, principal_filter(c4, 2));
    EXPECT_EQ(q.K.n, 3);
    EXPECT_EQ(q.theta[2], q.theta[3]);
    auto top_only = quotient_by_filter(c4, principal_filter(c4, 3));
    EXPECT_EQ(top_only.K.n, 4);
    auto sq = lattices::diamond();
    int a = -1;
    for (int x = 0; x < sq.n; ++x)
        if (x != sq.top && x != sq.bottom) a = x;
    EXPECT_EQ(quotient_by_filter(sq, principal_filter(sq, a)).K.n, 2);
    EXPECT_THROW(quotient_by_filter(sq, principal_filter(sq, sq.bottom)), std::invalid_argument);
}

TEST(Lattice, PrimeFilters) {
    auto sq = lattices::diamond();
    auto ps = prime_filters(sq);
    ASSERT_EQ(ps.size(), 2u);
    for (auto& F : ps) {
        int g = filter_generator(sq, F);
        EXPECT_NE(g, sq.top);
        EXPECT_NE(g, sq.bottom);
    }
    auto c2 = lattices::chain(2);
    auto p2 = prime_filters(c2);
    ASSERT_EQ(p2.size(), 1u);
    EXPECT_TRUE(p2[0].contains(c2.top));
    EXPECT_FALSE(p2[0].contains(c2.bottom));
    EXPECT_FALSE(representation_map(lattices::m3()).injective);
}

TEST(Lattice, TextRoundTrip) {
    auto L = lattices::n5();
    auto back = read_lattice(read_sexpr(to_string(lattice_sexpr(L))));
    EXPECT_EQ(back.n, L.n);
    EXPECT_EQ(back.le, L.le);
    EXPECT_EQ(read_lattice(read_sexpr("(lattice (chain 3))")).n, 3);
    EXPECT_THROW(read_lattice(read_sexpr("(lattice (size 2))")), ParseError);
}
