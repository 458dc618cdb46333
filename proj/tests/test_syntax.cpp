#include <gtest/gtest.h>

#include "ifol/text.hpp"

using namespace ifol;

TEST(Syntax, ParsePrintRoundTrip) {
    for (std::string s : {"(and p q)", "(or p (not p))", "true", "false", "(imp (and) (or))",
                          "(ex (y:U) (eq x y))", "(all (x:A y:B) (imp (rel R x) (ex (z:A) (rel S z y))))"}) {
        Formula f = parse_formula(s);
        Formula g = parse_formula(print(f));
        EXPECT_TRUE(same(f, g)) << s << " -> " << print(f);
    }
    Sequent q = parse_sequent("(seq (x:A) (rel R x) (ex (y:A) (eq x y)))");
    EXPECT_EQ(print(q), "(seq (x:A) (rel R x) (ex (y:A) (eq x y)))");
}

TEST(Syntax, EmptyConnectivesAreUnits) {
    EXPECT_TRUE(same(parse_formula("(or)"), bot()));
    EXPECT_TRUE(same(parse_formula("(and)"), top()));
    EXPECT_EQ(print(parse_formula("(or)")), "false");
}

TEST(Syntax, AlphaEquivalenceIsEquality) {
    EXPECT_TRUE(same(parse_formula("(ex (x:A) (rel R x))"), parse_formula("(ex (z:A) (rel R z))")));
    EXPECT_FALSE(same(parse_formula("(ex (x:A) (rel R x y))"), parse_formula("(ex (y:A) (rel R y y))")));
    EXPECT_TRUE(same(parse_formula("(ex (x:A) (ex (y:A) (rel R x y)))"), parse_formula("(ex (a:A) (ex (b:A) (rel R a b)))")));
    EXPECT_FALSE(same(parse_formula("(ex (x:A) (ex (y:A) (rel R x y)))"), parse_formula("(ex (a:A) (ex (b:A) (rel R b a)))")));
}

TEST(Syntax, SubstitutionAvoidsCapture) {
    Formula f = parse_formula("(ex (x:U) (eq x y))");
    Formula g = substitute(f, {{"y", var("x", "U")}});
    // the bound variable is still distinct from the substituted free x
    EXPECT_EQ(free_names(g), std::set<std::string>{"x"});
    EXPECT_FALSE(same(g, parse_formula("(ex (x:U) (eq x x))")));
    EXPECT_TRUE(same(g, parse_formula("(ex (w:U) (eq w x))")));
    EXPECT_EQ(print(g), "(ex (x1:U) (eq x1 x))");
}

TEST(Syntax, SortErrorNamesSymbol) {
    Signature sig;
    sig.add_sort("A");
    sig.add_sort("B");
    sig.add_rel({"R", {"A"}});
    try {
        parse_formula("(rel R x)", &sig, {{"x", "B"}});
        FAIL();
    } catch (const SortError& e) {
        EXPECT_EQ(e.symbol, "R");
    }
    EXPECT_THROW(parse_formula("(rel Q x)", &sig, {{"x", "A"}}), SortError);
}

TEST(Syntax, ParseErrorHasPosition) {
    try {
        parse_formula("(and p\n  (or q)");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos.line, 1);
    }
    EXPECT_THROW(parse_formula("(imp p)"), ParseError);
}

TEST(Syntax, SubformulaSetExamples) {
    Theory t = parse_theory("(theory (axiom (seq () true (or p q))))");
    auto s = subformula_set(t);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(print(s[0]), "true");
    EXPECT_EQ(print(s[1]), "(or p q)");
    EXPECT_EQ(print(s[2]), "p");
    EXPECT_EQ(print(s[3]), "q");

    Theory u = parse_theory("(theory (axiom (seq () true (ex (x:U) (rel R x)))))");
    auto v = subformula_set(u);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(print(v[2]), "(rel R x)");
}

TEST(Syntax, SubformulaSetIsClosedMonotoneIdempotent) {
    Theory t = parse_theory(
        "(theory (fragment first-order) (axiom (seq () (all (x:U) (imp (rel P x) (ex (y:U) (rel Q x y)))) (or a (and b c)))))");
    auto s = subformula_set(t);
    auto again = subformula_closure(s);
    ASSERT_EQ(s.size(), again.size());
    for (size_t i = 0; i < s.size(); ++i) EXPECT_TRUE(same(s[i], again[i]));
    std::set<Formula, FormulaLess> in(s.begin(), s.end());
    for (auto& f : s)
        for (auto& g : immediate_subformulas(f)) EXPECT_TRUE(in.count(g)) << print(g);
    Theory bigger = t;
    bigger.axioms.push_back(parse_sequent("(seq () d e)"));
    auto s2 = subformula_set(bigger);
    std::set<Formula, FormulaLess> in2(s2.begin(), s2.end());
    for (auto& f : s) EXPECT_TRUE(in2.count(f));
}

TEST(Syntax, TheoryRoundTrip) {
    Theory t = parse_theory(
        "(theory (fragment coherent) (sort A) (rel R (A A)) (const c A) (func f (A) A)"
        " (axiom (seq (x:A) (rel R x (f c)) (ex (y:A) (or (eq x y) (rel R y y))))))");
    Theory u = parse_theory(print(t));
    EXPECT_TRUE(t.sig == u.sig);
    ASSERT_EQ(u.axioms.size(), 1u);
    EXPECT_TRUE(same(t.axioms[0], u.axioms[0]));
    EXPECT_EQ(u.fragment, Fragment::Coherent);
}

TEST(Syntax, FragmentTagRejectsAxioms) {
    EXPECT_THROW(parse_theory("(theory (fragment coherent) (axiom (seq () p (imp q r))))"), FragmentError);
    EXPECT_THROW(parse_theory("(theory (fragment regular) (axiom (seq () p (or q r))))"), FragmentError);
}

TEST(Syntax, OpenCloseInverse) {
    Formula f = parse_formula("(ex (y:U z:U) (and (rel R x y) (ex (w:U) (rel S w z))))");
    auto [names, body] = open_quantifier(f);
    EXPECT_EQ(names.size(), 2u);
    EXPECT_TRUE(same(exists_raw(names, body), f));
}
