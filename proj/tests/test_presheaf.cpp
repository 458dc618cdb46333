#include <gtest/gtest.h>

#include "ifol/presheaf.hpp"

using namespace ifol;

namespace {

// the 2-chain as a site: node 1 sits above the root 0
CatStructure two_chain_p_on_top() {
    CatStructure S;
    S.cat = FinCat::of_tree({-1, 0});
    S.sig.add_rel({"p", {}});
    Presheaf one = terminal_presheaf(S.cat);
    Subfunctor p = empty_sub(one);
    p.in[1][0] = 1;
    S.rels["p"] = p;
    return S;
}

// one sort over the 2-chain: {a} at the root growing to {a, b} on top
CatStructure growing_domain() {
    CatStructure S;
    S.cat = FinCat::of_tree({-1, 0});
    S.sig.add_sort("U");
    S.sig.add_rel({"R", {"U"}});
    Presheaf D;
    D.size = {1, 2};
    D.restrict.resize(S.cat.num_arrows());
    for (int f = 0; f < S.cat.num_arrows(); ++f) {
        int c = S.cat.cod(f);
        for (int x = 0; x < D.size[c]; ++x) D.restrict[f].push_back(x);
    }
    S.sorts["U"] = D;
    Subfunctor R = empty_sub(D);
    R.in[1][1] = 1;
    S.rels["R"] = R;
    S.validate();
    return S;
}

}  // namespace

TEST(Presheaf, CategoryLawsAndRepresentables) {
    FinCat C = FinCat::of_tree({-1, 0, 0});
    EXPECT_NO_THROW(C.validate());
    for (int c = 0; c < C.n; ++c) EXPECT_NO_THROW(representable(C, c).validate(C));
    FinCat bad = C;
    bad.comp[bad.identity[0]][bad.identity[0]] = -1;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Presheaf, NegationOnTheTwoChain) {
    CatStructure S = two_chain_p_on_top();
    Presheaf one = terminal_presheaf(S.cat);
    SubHeyting H{S.cat, one};
    Subfunctor A = S.rels["p"];
    EXPECT_EQ(H.implies(A, A), H.top());
    Subfunctor notA = H.implies(A, H.bottom());
    EXPECT_EQ(notA, H.bottom());
    EXPECT_EQ(H.implies(notA, H.bottom()), H.top());
    EXPECT_NE(A, H.top());
    Subfunctor bad = empty_sub(one);
    bad.in[0][0] = 1;
    EXPECT_THROW(H.require(bad), std::invalid_argument);
}

TEST(Presheaf, InterpretAndForce) {
    CatStructure S = two_chain_p_on_top();
    Formula em = parse_formula("(or p (not p))");
    Subfunctor v = interpret(S, {}, em);
    EXPECT_FALSE(v.contains(0, 0));
    EXPECT_TRUE(v.contains(1, 0));
    EXPECT_FALSE(kj_force(S, 0, {}, em));
    EXPECT_TRUE(kj_force(S, 0, {}, parse_formula("(not (not p))")));
    EXPECT_TRUE(kj_force(S, 0, {}, top()));

    CatStructure G = growing_domain();
    Presheaf D = G.sorts["U"];
    EXPECT_EQ(interpret(G, {{"x", "U"}}, parse_formula("(eq x x)")), full_sub(D));
    EXPECT_EQ(interpret(G, {{"x", "U"}}, top()), full_sub(D));
    // all x. not not R(x) fails at the root: a never becomes R
    Formula f = parse_formula("(all (x:U) (not (not (R x))))");
    EXPECT_FALSE(kj_force(G, 0, {}, f));
    EXPECT_FALSE(kj_force(G, 1, {}, f));
    Formula g = parse_formula("(not (not (ex (x:U) (R x))))");
    EXPECT_TRUE(kj_force(G, 0, {}, g));
    EXPECT_FALSE(kj_force(G, 0, {}, parse_formula("(ex (x:U) (R x))")));
    for (auto& s : {"(all (x:U) (or (R x) (not (R x))))", "(ex (x:U) (not (R x)))", "(imp (ex (x:U) (R x)) false)"}) {
        Formula h = parse_formula(s);
        Subfunctor val = interpret(G, {}, h);
        for (int c = 0; c < 2; ++c) EXPECT_EQ(val.contains(c, 0), kj_force(G, c, {}, h)) << s << " at " << c;
    }
}

TEST(Presheaf, ForallAgreesWithUniversalProperty) {
    CatStructure G = growing_domain();
    FinCat& C = G.cat;
    std::vector<const Presheaf*> fs = {&G.sorts["U"], &G.sorts["U"]};
    Presheaf E = product(C, fs);
    NatTrans pi = projection(C, fs, 1);
    const Presheaf& F = G.sorts["U"];
    for (auto& A : all_subfunctors(C, E)) {
        auto a = forall_along(C, E, F, pi, A);
        EXPECT_EQ(a, forall_along_search(C, E, F, pi, A));
        EXPECT_EQ(a, forall_along_exhaustive(C, E, F, pi, A));
    }
    // forall along the identity is the identity
    NatTrans id = projection(C, {&F}, 1);
    for (auto& A : all_subfunctors(C, F)) EXPECT_EQ(forall_along(C, F, F, id, A), A);
}

TEST(Presheaf, ChainPoset) {
    FinCat single = FinCat::thin(1, [](int, int) { return true; });
    EXPECT_EQ(chain_poset(single).P.n, 1);
    // site arrow f: B -> A, i.e. the Kripke order A -> B
    FinCat M = FinCat::thin(2, [](int a, int b) { return a == b || (a == 1 && b == 0); }, {"A", "B"});
    ChainPoset R = chain_poset(M);
    ASSERT_EQ(R.P.n, 3);
    EXPECT_EQ(R.last, (std::vector<int>{0, 1, 1}));
    EXPECT_GE(R.P.thin_arrow(2, 0), 0);  // (A) is an initial segment of (A -> B)
    EXPECT_LT(R.P.thin_arrow(2, 1), 0);

    FinCat cyc;
    cyc.n = 1;
    cyc.arrows = {{0, 0, "id"}, {0, 0, "e"}};
    cyc.identity = {0};
    cyc.comp = {{0, 1}, {1, 1}};
    EXPECT_NO_THROW(cyc.validate());
    EXPECT_THROW(chain_poset(cyc), std::invalid_argument);
}

TEST(Presheaf, TransportOnSmallCategories) {
    auto cats = acyclic_categories(2, 2);
    EXPECT_GE(cats.size(), 4u);
    for (auto& M : cats) {
        ChainPoset R = chain_poset(M);
        for (int c = 0; c < M.n; ++c) {
            Presheaf F = representable(M, c);
            auto rep = verify_transport(M, R, F);
            EXPECT_TRUE(rep.ok) << rep.failure;
            std::vector<const Presheaf*> fs = {&F, &F};
            Presheaf E = product(M, fs);
            auto r2 = verify_transport_along(M, R, E, F, projection(M, fs, 1));
            EXPECT_TRUE(r2.ok) << r2.failure;
        }
    }
}

TEST(Presheaf, TextRoundTrip) {
    FinCat C = read_category(read_sexpr("(category (objects A B) (arrow f A B))"));
    EXPECT_EQ(C.num_arrows(), 3);
    Presheaf F = read_presheaf(read_sexpr("(presheaf (set A 2) (set B 1) (restrict f (0)))"), C);
    EXPECT_EQ(F.size, (std::vector<int>{2, 1}));
    FinCat D = read_category(read_sexpr(to_string(category_sexpr(C))));
    EXPECT_EQ(D.num_arrows(), 3);
    EXPECT_THROW(read_presheaf(read_sexpr("(presheaf (set A 2) (set B 1) (restrict f (5)))"), C), ParseError);
    FinCat P = read_category(read_sexpr("(category (objects a b c) (poset (le a b) (le b c)))"));
    EXPECT_EQ(P.num_arrows(), 6);
}

TEST(Presheaf, StructureTextRoundTrip) {
    CatStructure G = growing_domain();
    std::string t = to_string(cat_structure_sexpr(G));
    CatStructure back = read_cat_structure(read_sexpr(t));
    EXPECT_EQ(to_string(cat_structure_sexpr(back)), t);
    EXPECT_EQ(back.rels["R"], G.rels["R"]);
    CatStructure P = read_cat_structure(read_sexpr(
        "(cat-structure (category (objects A B) (arrow f A B)) (signature (sort U) (const c U) (rel p ()))"
        " (sort U (presheaf (set A 1) (set B 1) (restrict f (0)))) (func c (at A (() 0)) (at B (() 0))) (rel p (at A ())))"));
    EXPECT_TRUE(P.rels["p"].contains(0, 0));
    EXPECT_FALSE(P.rels["p"].contains(1, 0));
    // p at B must restrict to A
    EXPECT_THROW(read_cat_structure(read_sexpr(
                     "(cat-structure (category (objects A B) (arrow f A B)) (signature (rel p ())) (rel p (at B ())))")),
                 ParseError);
    EXPECT_THROW(read_cat_structure(read_sexpr("(cat-structure (category (objects A)) (signature (sort U)))")), ParseError);
}
