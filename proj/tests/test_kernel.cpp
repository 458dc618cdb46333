#include <gtest/gtest.h>

#include "ifol/gen.hpp"
#include "ifol/proofs.hpp"

using namespace ifol;
namespace b = ifol::build;

namespace {

Theory base(const std::string& frag = "first-order") {
    return parse_theory("(theory (fragment " + frag + ") (sort U) (rel p) (rel q) (rel r) (rel R (U)) (rel S (U U)))");
}

Formula F(const Theory& t, const std::string& s, const Context& ctx = {}) { return parse_formula(s, &t.sig, ctx); }

}  // namespace

TEST(Kernel, TreeOfHeightOneIsTheExistentialStep) {
    Theory t = base("regular");
    TreeAssignment a;
    a.gamma = 1;
    a.height = 1;
    a.labels[{}] = top();
    a.blocks[{0}] = {{"x", "U"}};
    a.labels[{0}] = F(t, "(rel R x)", {{"x", "U"}});
    auto inst = tt_rule_instance(a);
    ASSERT_EQ(inst.premises.size(), 1u);
    EXPECT_EQ(print(inst.premises[0]), "(seq () true (ex (x:U) (rel R x)))");
    EXPECT_EQ(print(inst.conclusion), "(seq () true (ex (x:U) (and true (rel R x))))");
}

TEST(Kernel, HeightZeroIsIdentity) {
    TreeAssignment a;
    a.gamma = 2;
    a.height = 0;
    a.labels[{}] = atom("p");
    auto inst = tt_rule_instance(a);
    EXPECT_TRUE(inst.premises.empty());
    EXPECT_EQ(print(inst.conclusion), "(seq () p p)");
}

TEST(Kernel, BarOnBinaryTree) {
    Theory t = base("coherent");
    TreeAssignment a;
    a.gamma = 2;
    a.height = 2;
    std::vector<std::string> names = {"p", "q", "r"};
    int k = 0;
    for (int l = 0; l <= 2; ++l)
        for (auto& n : level_nodes(2, l)) a.labels[n] = atom(names[k++ % 3]);
    Bar bar = {{0}, {1, 0}, {1, 1}};
    auto inst = tt_bar_instance(a, bar);
    EXPECT_EQ(inst.premises.size(), 3u);
    EXPECT_EQ(print(inst.conclusion), "(seq () p (or (and p q) (and p r r) (and p r p)))");
    EXPECT_THROW(tt_bar_instance(a, {{0}, {0, 1}, {1}}), ProvisoError);
    EXPECT_THROW(tt_bar_instance(a, {{0}, {1, 0}}), ProvisoError);
}

TEST(Kernel, ProvisoViolationNamesNode) {
    TreeAssignment a;
    a.gamma = 1;
    a.height = 1;
    a.labels[{}] = top();
    a.labels[{0}] = rel("R", {var("x", "U")});
    try {
        a.validate();
        FAIL();
    } catch (const ProvisoError& e) {
        EXPECT_NE(std::string(e.what()).find("<0>"), std::string::npos);
    }
}

TEST(Kernel, TtProofChecks) {
    Theory t = base("regular");
    t.axioms.push_back(parse_sequent("(seq () true (ex (x:U) (rel R x)))", &t.sig));
    TreeAssignment a;
    a.gamma = 1;
    a.height = 1;
    a.labels[{}] = top();
    a.blocks[{0}] = {{"x", "U"}};
    a.labels[{0}] = F(t, "(rel R x)", {{"x", "U"}});
    auto inst = tt_rule_instance(a);
    RuleData d;
    d.assignment = a;
    Proof p = b::node("tt", inst.conclusion, {b::axiom(inst.premises[0])}, d);
    EXPECT_TRUE(check_proof(t, p).ok) << check_proof(t, p).reason;
    Proof bad = p;
    bad.premises.clear();
    EXPECT_FALSE(check_proof(t, bad).ok);
}

TEST(Kernel, RejectionsCarryPathAndReason) {
    Theory t = base("coherent");
    Formula pq = F(t, "(and p q)");
    Proof wrong = b::and_elim({}, pq, 1);
    wrong.concl.rhs = atom("p");
    auto r = check_proof(t, wrong);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.rule, "and-elim");

    Proof c = b::cut(b::and_elim({}, pq, 0), b::id({}, atom("q")));
    r = check_proof(t, c);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.rule, "cut");

    // implication rules are gated out of the coherent fragment
    Proof imp = b::imp_down(b::and_elim({}, pq, 1));
    EXPECT_TRUE(check_proof(base(), imp).ok);
    EXPECT_FALSE(check_proof(t, imp).ok);

    Proof nested = b::and_intro({}, pq, {b::and_elim({}, pq, 0), b::and_elim({}, pq, 1)});
    nested.premises[1].concl.lhs = atom("q");
    r = check_proof(t, nested);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.path, std::vector<int>{});  // the and-intro node itself mismatches
}

TEST(Kernel, DerivedFrobeniusAndSmallDistributivity) {
    Theory t = base();
    Formula q = F(t, "(ex (y:U) (rel S x y))", {{"x", "U"}});
    Formula phi = F(t, "(rel R x)", {{"x", "U"}});
    Context ctx{{"x", "U"}};
    Proof fr = b::derive_frobenius_fo(ctx, phi, q);
    auto r = check_proof(t, fr);
    EXPECT_TRUE(r.ok) << r.reason;
    EXPECT_FALSE(proof_uses(fr, "frobenius"));
    EXPECT_TRUE(same(fr.concl, b::frobenius(ctx, phi, q).concl));

    Formula d = F(t, "(or p q r)");
    Proof sd = b::derive_small_dist_fo({}, atom("p"), d);
    r = check_proof(t, sd);
    EXPECT_TRUE(r.ok) << r.reason;
    EXPECT_TRUE(same(sd.concl, b::small_dist({}, atom("p"), d).concl));
}

TEST(Kernel, ExistsMonoAndSubstitution) {
    Theory t = base("regular");
    Context ctx{{"x", "U"}};
    Proof inner = b::and_elim({{"x", "U"}, {"y", "U"}}, F(t, "(and (rel S x y) (rel R y))", {{"x", "U"}, {"y", "U"}}), 1);
    Proof m = b::exists_mono(ctx, {{"y", "U"}}, inner);
    auto r = check_proof(t, m);
    EXPECT_TRUE(r.ok) << r.reason;
    EXPECT_EQ(print(m.concl), "(seq (x:U) (ex (y:U) (and (rel S x y) (rel R y))) (ex (y:U) (rel R y)))");

    Proof s = b::substitute(b::id(ctx, F(t, "(rel R x)", ctx)), {{"z", "U"}}, {{"x", var("z", "U")}});
    EXPECT_TRUE(check_proof(t, s).ok);
    Proof bad = s;
    bad.concl.rhs = F(t, "(rel R x)", ctx);
    EXPECT_FALSE(check_proof(t, bad).ok);
}

TEST(Kernel, EmOnlyClassical) {
    Theory t = base("first-order+em");
    Proof em = b::leaf("em", {{}, top(), disj2(atom("p"), neg(atom("p")))});
    EXPECT_TRUE(check_proof(t, em).ok);
    EXPECT_FALSE(check_proof(base(), em).ok);
}

TEST(Kernel, DcAndChoiceInstances) {
    Theory t = base("regular");
    DcChain c;
    c.formulas = {top(), F(t, "(rel R x)", {{"x", "U"}}), F(t, "(rel S x y)", {{"x", "U"}, {"y", "U"}})};
    c.blocks = {{{"x", "U"}}, {{"y", "U"}}};
    auto inst = dc_instance(c);
    ASSERT_EQ(inst.premises.size(), 2u);
    EXPECT_EQ(print(inst.conclusion), "(seq () true (ex (x:U y:U) (rel S x y)))");

    ChoiceData ch;
    ch.phi = top();
    ch.blocks = {{{"x", "U"}}, {{"y", "U"}}};
    ch.parts = {F(t, "(rel R x)", {{"x", "U"}}), F(t, "(rel R y)", {{"y", "U"}})};
    auto ci = choice_instance(ch);
    EXPECT_EQ(print(ci.premises[0]), "(seq () true (and (ex (x:U) (rel R x)) (ex (y:U) (rel R y))))");
    EXPECT_EQ(print(ci.conclusion), "(seq () true (ex (x:U y:U) (and (rel R x) (rel R y))))");
}

TEST(Kernel, ProofTextRoundTrip) {
    Theory t = base();
    Proof fr = b::derive_frobenius_fo({{"x", "U"}}, F(t, "(rel R x)", {{"x", "U"}}), F(t, "(ex (y:U) (rel S x y))", {{"x", "U"}}));
    Proof back = read_proof(read_sexpr(print(fr)), t.sig);
    EXPECT_EQ(print(back), print(fr));
    EXPECT_TRUE(check_proof(t, back).ok);

    TreeAssignment a;
    a.gamma = 2;
    a.height = 1;
    a.labels[{}] = top();
    a.blocks[{1}] = {{"x", "U"}};
    a.labels[{0}] = atom("p");
    a.labels[{1}] = F(t, "(rel R x)", {{"x", "U"}});
    auto inst = tt_rule_instance(a);
    RuleData d;
    d.assignment = a;
    Proof tt = b::node("tt", inst.conclusion, {b::leaf("id", inst.premises[0])}, d);
    Proof tt2 = read_proof(read_sexpr(print(tt)), t.sig);
    EXPECT_EQ(print(tt2), print(tt));
    EXPECT_THROW(read_proof(read_sexpr("(proof nonsense (seq () p p))"), t.sig), ParseError);
}

TEST(Generator, RandomProofsCheckInTheirFragment) {
    gen::Rng rng(2024);
    for (int i = 0; i < 400; ++i) {
        Fragment fr = std::vector<Fragment>{Fragment::Regular, Fragment::Coherent, Fragment::Geometric, Fragment::FirstOrder,
                                            Fragment::Classical}[i % 5];
        Signature sig = i % 3 ? gen::small_first_order() : gen::propositional(3);
        Theory T = gen::random_theory(rng, sig, fr, 2);
        gen::ProofOptions o;
        o.fragment = fr;
        o.depth = 1 + i % 5;
        Proof p = gen::random_proof(rng, T, o);
        auto r = check_proof(T, p, fr);
        ASSERT_TRUE(r.ok) << fragment_name(fr) << " " << r.rule << ": " << r.reason << "\n" << print(p);
    }
}
