#include <gtest/gtest.h>

#include "ifol/sheaf.hpp"

using namespace ifol;

namespace {

// brute-force closure test for a sieve family: every sieve that is locally covering is covering
bool is_topology(const FinCat& C, const Topology& J) {
    for (int c = 0; c < C.n; ++c) {
        if (!J.covers(c, max_sieve(C, c))) return false;
        for (auto& s : J.covering[c])
            for (int f : C.into(c))
                if (!J.covers(C.dom(f), pullback_sieve(C, s, f))) return false;
        for (auto& r : all_sieves(C, c))
            for (auto& s : J.covering[c]) {
                bool local = true;
                for (int f = 0; f < C.num_arrows(); ++f)
                    if (s[f] && !J.covers(C.dom(f), pullback_sieve(C, r, f))) local = false;
                if (local && !J.covers(c, r)) return false;
            }
    }
    return true;
}

}  // namespace

TEST(Sheaf, SaturationIsATopology) {
    for (auto L : {lattices::diamond(), lattices::chain(3), lattices::boolean(3), lattices::n5()}) {
        Site S = joint_cover_site(L);
        Topology J = saturate(S);
        EXPECT_TRUE(is_topology(S.cat, J));
        for (int c = 0; c < L.n; ++c)
            for (auto& fam : S.coverage[c]) EXPECT_TRUE(J.covers(c, generated_sieve(S.cat, c, fam)));
    }
    Site bad = joint_cover_site(lattices::diamond());
    bad.coverage[3].push_back({bad.cat.thin_arrow(0, 1)});
    EXPECT_THROW(saturate(bad), std::invalid_argument);
}

TEST(Sheaf, RepresentablesAreSheavesOnDistributiveSites) {
    FinLattice L = lattices::diamond();
    Site S = joint_cover_site(L);
    Topology J = saturate(S);
    for (int c = 0; c < L.n; ++c) EXPECT_TRUE(is_sheaf(S.cat, J, representable(S.cat, c)));
    // two points over the top, one elsewhere: gluing along {a, b} is not unique
    Presheaf F = terminal_presheaf(S.cat);
    F.size[3] = 2;
    for (int f = 0; f < S.cat.num_arrows(); ++f)
        if (S.cat.cod(f) == 3) F.restrict[f] = S.cat.dom(f) == 3 ? std::vector<int>{0, 1} : std::vector<int>{0, 0};
    F.validate(S.cat);
    SheafCheck r = check_sheaf(S.cat, J, F);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.amalgamations, 2);
}

TEST(Sheaf, SheafificationUnit) {
    FinLattice L = lattices::diamond();
    Site S = joint_cover_site(L);
    Topology J = saturate(S);
    const FinCat& C = S.cat;
    Presheaf F = terminal_presheaf(C);
    F.size[3] = 2;
    for (int f = 0; f < C.num_arrows(); ++f)
        if (C.cod(f) == 3) F.restrict[f] = C.dom(f) == 3 ? std::vector<int>{0, 1} : std::vector<int>{0, 0};
    Sheafification a = sheafify(C, J, F);
    a.sheaf.validate(C);
    EXPECT_TRUE(a.unit.is_natural(C, F, a.sheaf));
    EXPECT_TRUE(is_sheaf(C, J, a.sheaf));
    EXPECT_FALSE(is_iso(C, F, a.sheaf, a.unit));
    // bottom is covered by the empty family, so every sheaf is a point there
    EXPECT_EQ(a.sheaf.size[0], 1);
    // a sheaf is its own sheafification
    Presheaf Y = representable(C, 1);
    Sheafification b = sheafify(C, J, Y);
    EXPECT_TRUE(is_iso(C, Y, b.sheaf, b.unit));
    // maps into a sheaf factor uniquely through the unit
    Presheaf G = representable(C, 3);
    auto into_g = all_nat_trans(C, F, G);
    auto from_sheaf = all_nat_trans(C, a.sheaf, G);
    for (auto& t : into_g) {
        int factorizations = 0;
        for (auto& u : from_sheaf)
            if (compose_nat(C, u, a.unit).at == t.at) ++factorizations;
        EXPECT_EQ(factorizations, 1);
    }
}

TEST(Sheaf, EmbeddingOnDistributiveLattices) {
    for (auto L : {lattices::diamond(), lattices::chain(4), lattices::boolean(3)}) {
        EmbeddingReport r = check_embedding(L);
        for (auto& i : r.items) EXPECT_TRUE(i.ok && i.applicable) << i.name << ": " << i.detail;
    }
    EmbeddingReport m3 = check_embedding(lattices::m3());
    EXPECT_FALSE(m3.ok());
    ASSERT_NE(m3.find("unions"), nullptr);
    EXPECT_FALSE(m3.find("unions")->applicable);
}

TEST(Sheaf, TreeTransitivityWithSubsheaves) {
    FinLattice L = lattices::diamond();
    Site S = joint_cover_site(L);
    Topology J = saturate(S);
    Presheaf one = terminal_presheaf(S.cat);
    // 1 covered by {a, b}; a by {a, 0}; b by {0, b}
    SheafFamily fam{2, 2, {}};
    for (int x : {3, 1, 2, 1, 0, 0, 2}) fam.labels.push_back(yoneda_sub(L, x));
    TTVerdict v = check_tt_in_sheaves(S.cat, J, one, fam);
    EXPECT_TRUE(v.ok) << v.detail;
    fam.labels[2] = yoneda_sub(L, 0);
    v = check_tt_in_sheaves(S.cat, J, one, fam);
    EXPECT_FALSE(v.premises_hold);
    EXPECT_EQ(v.failing_level, 1);
}

TEST(Sheaf, SiteTextRoundTrip) {
    Site S = joint_cover_site(lattices::chain(2));
    std::string t = to_string(site_sexpr(S));
    Site back = read_site(read_sexpr(t));
    EXPECT_EQ(to_string(site_sexpr(back)), t);
    EXPECT_THROW(read_site(read_sexpr("(site (category (objects A B) (poset (le A B))) (cover A (A<=B)))")), ParseError);
}
