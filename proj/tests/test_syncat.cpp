#include <gtest/gtest.h>

#include "ifol/gen.hpp"
#include "ifol/syncat.hpp"

using namespace ifol;

namespace {

Signature functional() {
    Signature sig = gen::small_first_order();
    sig.add_func({"f", {"U"}, "U"});
    sig.add_func({"g", {"U"}, "U"});
    return sig;
}

Formula F(const std::string& s, const Signature& sig, const Context& ctx = {}) { return parse_formula(s, &sig, ctx); }

const Context X{{"x", "U"}}, Y{{"y", "U"}}, Z{{"z", "U"}};

Context operator+(Context a, const Context& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

/** [x, true] -> [y, true] given by y = t(x) */
SynMorphism graph(const Signature& sig, const std::string& term, const Context& x = X, const Context& y = Y) {
    std::string yn = y[0].name;
    return {{x, top()}, {y, top()}, F("(= " + yn + " " + term + ")", sig, x + y)};
}

bool truth(const Formula& f, const Signature& sig, unsigned v) {
    switch (f->kind) {
        case FormulaNode::Rel:
            for (size_t i = 0; i < sig.rels.size(); ++i)
                if (sig.rels[i].name == f->name) return v >> i & 1;
            throw std::logic_error("unknown atom");
        case FormulaNode::And:
            return std::all_of(f->subs.begin(), f->subs.end(), [&](const Formula& s) { return truth(s, sig, v); });
        case FormulaNode::Or:
            return std::any_of(f->subs.begin(), f->subs.end(), [&](const Formula& s) { return truth(s, sig, v); });
        case FormulaNode::Imp: return !truth(f->subs[0], sig, v) || truth(f->subs[1], sig, v);
        default: throw std::logic_error("not propositional");
    }
}

}  // namespace

// ------------------------------------------------------------ oracles

TEST(Oracle, SearchFindsCheckedProofs) {
    Signature sig = gen::propositional(3);
    Theory T{sig, {{{}, F("p", sig), F("q", sig)}, {{}, F("q", sig), F("r", sig)}}, Fragment::Coherent};
    for (auto [l, r] : std::vector<std::pair<std::string, std::string>>{
             {"(and p q)", "(and q p)"}, {"(or p q)", "(or q p)"}, {"p", "r"}, {"(or p r)", "r"}, {"false", "p"}, {"p", "true"}}) {
        Sequent s{{}, F(l, sig), F(r, sig)};
        auto p = search_proof(T, s);
        ASSERT_TRUE(p.has_value()) << l << " |- " << r;
        EXPECT_TRUE(check_proof(T, *p).ok);
        EXPECT_TRUE(same(p->concl, s));
    }
    EXPECT_FALSE(search_proof(T, {{}, F("r", sig), F("p", sig)}).has_value());
}

TEST(Oracle, SearchHandlesQuantifiersAndEquality) {
    Signature sig = functional();
    Theory T{sig, {{X, F("(P x)", sig, X), F("(R x x)", sig, X)}}, Fragment::FirstOrder};
    std::vector<Sequent> goals = {
        {{}, F("(and (ex (x) (P x)) (R c c))", sig), F("(ex (x) (and (P x) (R c c)))", sig)},
        {{}, F("(P c)", sig), F("(ex (x) (R x x))", sig)},
        {X, F("(all (y) (P y))", sig, X), F("(R x x)", sig, X)},
        {X + Y, F("(and (= x y) (P x))", sig, X + Y), F("(P y)", sig, X + Y)},
        {X + Y, F("(= x y)", sig, X + Y), F("(= y x)", sig, X + Y)},
        {X, F("(P x)", sig, X), F("(imp (P x) (R x x))", sig, X)},
    };
    for (auto& s : goals) {
        auto p = search_proof(T, s, 2);
        ASSERT_TRUE(p.has_value()) << print(s);
        EXPECT_TRUE(check_proof(T, *p, Fragment::FirstOrder).ok) << print(s);
    }
}

TEST(Oracle, SemanticAgreesWithTruthTables) {
    gen::Rng rng(4);
    Signature sig = gen::propositional(3);
    gen::FormulaOptions o;
    o.fragment = Fragment::Coherent;
    o.depth = 2;
    int valid = 0, found = 0;
    for (int i = 0; i < 20; ++i) {
        Theory T = gen::random_theory(rng, sig, Fragment::Coherent, 2);
        SynOracle sem = semantic_oracle(T, 1);
        SynOracle search = search_oracle(T, 2);
        for (int j = 0; j < 10; ++j) {
            Formula a = gen::random_formula(rng, sig, {}, o), c = gen::random_formula(rng, sig, {}, o);
            bool want = true;
            for (unsigned v = 0; v < 8; ++v) {
                bool model = std::all_of(T.axioms.begin(), T.axioms.end(),
                                         [&](const Sequent& s) { return !truth(s.lhs, sig, v) || truth(s.rhs, sig, v); });
                if (model && truth(a, sig, v) && !truth(c, sig, v)) want = false;
            }
            EXPECT_EQ(sem({{}, a, c}), from_bool(want)) << print(a) << " |- " << print(c);
            // the search oracle is sound and never says no
            Verdict s = search({{}, a, c});
            EXPECT_NE(s, Verdict::No);
            if (s == Verdict::Yes) EXPECT_TRUE(want) << print(a) << " |- " << print(c);
            valid += want;
            found += s == Verdict::Yes;
        }
    }
    // the search should find most valid propositional entailments at this size
    EXPECT_GE(found * 10, valid * 8) << found << " of " << valid;
}

TEST(Oracle, ExcludedMiddleIsRefutedIntuitionistically) {
    Signature sig = gen::propositional(1);
    Theory T{sig, {}, Fragment::FirstOrder};
    Sequent em{{}, top(), F("(or p (not p))", sig)};
    EXPECT_EQ(semantic_oracle(T)(em), Verdict::No);
    EXPECT_EQ(search_oracle(T)(em), Verdict::Unknown);
    Sequent dn{{}, top(), F("(not (not (or p (not p))))", sig)};
    EXPECT_EQ(semantic_oracle(T)(dn), Verdict::Yes);
}

TEST(Oracle, MemoSharesAlphaVariants) {
    Signature sig = gen::small_first_order();
    Theory T{sig, {}, Fragment::Coherent};
    int calls = 0;
    SynOracle o;
    o.theory = T;
    o.decide = [&](const Sequent&) {
        ++calls;
        return Verdict::Yes;
    };
    o({{}, F("(ex (x) (P x))", sig), top()});
    o({{}, F("(ex (z) (P z))", sig), top()});
    SynOracle copy = o;
    copy({{}, F("(ex (w) (P w))", sig), top()});
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(o.cached(), 1u);
}

// ------------------------------------------------------------ morphisms

TEST(Syncat, IdentityVerifies) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynObject o{X, F("(P x)", sig, X)};
    SynMorphism id = identity_morphism(o);
    EXPECT_TRUE(same(id.theta, conj2(o.phi, eqs(X, id.target.ctx))));
    EXPECT_EQ(verify_morphism(semantic_oracle(T), id).verdict, Verdict::Yes);
    EXPECT_EQ(verify_morphism(search_oracle(T), id).verdict, Verdict::Yes);
}

TEST(Syncat, RejectsNonFunctionalAndEmpty) {
    Signature sig = functional();
    // R total, so only functionality can fail
    Theory T{sig, {{X, top(), F("(ex (y) (R x y))", sig, X)}}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    SynMorphism rel{{X, top()}, {Y, top()}, F("(R x y)", sig, X + Y)};
    auto v = verify_morphism(o, rel);
    EXPECT_EQ(v.verdict, Verdict::No);
    EXPECT_EQ(v.failed, "theta(x,y) and theta(x,y') |- y = y'");
    SynMorphism empty{{X, top()}, {Y, top()}, bot()};
    auto w = verify_morphism(o, empty);
    EXPECT_EQ(w.verdict, Verdict::No);
    EXPECT_EQ(w.failed, "phi |- ex y. theta");
    SynMorphism stray{{X, top()}, {Y, top()}, F("(R x z)", sig, X + Y + Z)};
    EXPECT_EQ(verify_morphism(o, stray).verdict, Verdict::No);
    EXPECT_THROW(verify_morphism(o, {{X, top()}, {X, top()}, top()}), std::invalid_argument);
}

TEST(Syncat, CompositionIsRelationalComposition) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynMorphism m1 = graph(sig, "(f x)");
    SynMorphism m2 = graph(sig, "(g y)", Y, Z);
    SynMorphism c = compose(m1, m2);
    EXPECT_EQ(verify_morphism(semantic_oracle(T), c).verdict, Verdict::Yes);
    EnumerateOptions eo;
    eo.bound = 2;
    eo.up_to_iso = false;
    for (auto& M : enumerate_models(T, eo))
        for (int x = 0; x < M.size("U"); ++x)
            for (int z = 0; z < M.size("U"); ++z)
                EXPECT_EQ(holds(M, c.theta, {{"x", x}, {"z", z}}), M.apply("g", {M.apply("f", {x})}) == z);
}

TEST(Syncat, CompositionRenamesClashes) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynMorphism m1 = graph(sig, "(f x)");
    SynMorphism back = graph(sig, "(g y)", Y, X);  // lands in a context named x again
    SynMorphism c = compose(m1, back);
    EXPECT_NE(c.target.ctx[0].name, "x");
    EXPECT_EQ(verify_morphism(semantic_oracle(T), c).verdict, Verdict::Yes);
    SynMorphism guarded{{Y, F("(P y)", sig, Y)}, {Z, top()}, F("(and (P y) (= z y))", sig, Y + Z)};
    EXPECT_THROW(compose(m1, guarded), std::invalid_argument);
}

TEST(Syncat, UnitAndAssociativityOnRandomGraphs) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    gen::Rng rng(9);
    std::vector<std::string> terms = {"(f {})", "(g {})", "(f (g {}))", "c", "{}"};
    auto pick = [&](const std::string& v) {
        std::string t = terms[gen::uniform(rng, 0, static_cast<int>(terms.size()) - 1)];
        if (auto k = t.find("{}"); k != std::string::npos) t.replace(k, 2, v);
        return t;
    };
    for (int i = 0; i < 15; ++i) {
        Context W{{"w", "U"}};
        SynMorphism a = graph(sig, pick("x"));
        SynMorphism b2 = graph(sig, pick("y"), Y, Z);
        SynMorphism c = graph(sig, pick("z"), Z, W);
        EXPECT_EQ(equivalent(o, compose(compose(a, b2), c), compose(a, compose(b2, c))), Verdict::Yes);
        EXPECT_EQ(equivalent(o, compose(a, identity_morphism(a.target)), a), Verdict::Yes);
        EXPECT_EQ(equivalent(o, compose(identity_morphism(a.source), a), a), Verdict::Yes);
    }
}

TEST(Syncat, Classify) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    auto id = classify(o, identity_morphism({X, top()}));
    EXPECT_EQ(id.iso, Verdict::Yes);
    EXPECT_EQ(id.mono, Verdict::Yes);
    auto k = classify(o, graph(sig, "c"));
    EXPECT_EQ(k.iso, Verdict::No);
    EXPECT_EQ(k.mono, Verdict::No);
    // mono with theta = (x = y) and psi(y): normal form is psi
    SynMorphism m{{X, F("(P x)", sig, X)}, {Y, top()}, F("(and (= x y) (P y))", sig, X + Y)};
    EXPECT_EQ(classify(o, m).mono, Verdict::Yes);
    SynObject nf = subobject_normal_form(m);
    EXPECT_EQ(subobject_leq(o, nf, {Y, F("(P y)", sig, Y)}), Verdict::Yes);
    EXPECT_EQ(subobject_leq(o, {Y, F("(P y)", sig, Y)}, nf), Verdict::Yes);
}

// the diagonal into the kernel pair of f is iso exactly when f is mono
TEST(Syncat, DiagonalIntoKernelPair) {
    Signature sig = functional();
    Theory injective{sig, {{X + Y, F("(= (f x) (f y))", sig, X + Y), F("(= x y)", sig, X + Y)}}, Fragment::Coherent};
    Theory plain{sig, {}, Fragment::Coherent};
    for (auto* T : {&injective, &plain})
        for (std::string t : {"(f x)", "c", "x"}) {
            SynOracle o = semantic_oracle(*T);
            SynMorphism f = graph(sig, t);
            Context X1{{"x1", "U"}}, X2{{"x2", "U"}};
            Formula kp = exists(Y, conj2(rename(f.theta, X, X1), rename(f.theta, X, X2)));
            SynObject kernel{X1 + X2, kp};
            SynMorphism diag{{X, top()}, kernel, F("(and (= x1 x) (= x2 x))", sig, X + X1 + X2)};
            ASSERT_EQ(verify_morphism(o, diag).verdict, Verdict::Yes) << t;
            EXPECT_EQ(classify(o, diag).iso, classify(o, f).mono) << t;
        }
}

// ------------------------------------------------------------ constructions

TEST(Syncat, ProductOfTwoObjects) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    ProductData p = product({{X, top()}, {Y, top()}});
    EXPECT_EQ(p.object.ctx, X + Y);
    EXPECT_TRUE(same(p.object.phi, conj({top(), top()})));
    for (auto& pr : p.projections) EXPECT_EQ(verify_morphism(o, pr).verdict, Verdict::Yes);
    // the cone (f, g) from [w, true] factors through the pairing
    Context W{{"w", "U"}}, A{{"a", "U"}}, B{{"b", "U"}};
    SynMorphism f{{W, top()}, rename_object(p.projections[0].target, A), F("(= a (f w))", sig, W + A)};
    SynMorphism g{{W, top()}, rename_object(p.projections[1].target, B), F("(= b (g w))", sig, W + B)};
    SynMorphism pair = pairing_morphism(p, {f, g});
    EXPECT_EQ(verify_morphism(o, pair).verdict, Verdict::Yes);
    EXPECT_EQ(equivalent(o, compose(pair, p.projections[0]), f), Verdict::Yes);
    EXPECT_EQ(equivalent(o, compose(pair, p.projections[1]), g), Verdict::Yes);
    // factors with the same variable are renamed apart
    ProductData sq = product({{X, top()}, {X, top()}});
    EXPECT_EQ(sq.object.ctx.size(), 2u);
    EXPECT_NE(sq.object.ctx[0].name, sq.object.ctx[1].name);
}

TEST(Syncat, ImageOfProjection) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    Context Y2{{"v", "U"}};
    SynObject src{X + Y, F("(and (P x) (R y y))", sig, X + Y)};
    SynMorphism proj{src, {Y2, F("(R v v)", sig, Y2)}, F("(and (and (P x) (R y y)) (= y v))", sig, X + Y + Y2)};
    ASSERT_EQ(verify_morphism(o, proj).verdict, Verdict::Yes);
    ImageData im = image(proj);
    EXPECT_EQ(subobject_leq(o, im.object, {Y2, F("(ex (x) (and (P x) (R v v)))", sig, Y2)}), Verdict::Yes);
    EXPECT_EQ(subobject_leq(o, {Y2, F("(ex (x) (and (P x) (R v v)))", sig, Y2)}, im.object), Verdict::Yes);
    EXPECT_EQ(verify_morphism(o, im.inclusion).verdict, Verdict::Yes);
    EXPECT_EQ(verify_morphism(o, im.cover).verdict, Verdict::Yes);
    EXPECT_EQ(classify(o, im.inclusion).mono, Verdict::Yes);
    EXPECT_EQ(equivalent(o, compose(im.cover, im.inclusion), proj), Verdict::Yes);
}

TEST(Syncat, Equalizer) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    SynMorphism f = graph(sig, "(f x)"), g = graph(sig, "(g x)");
    EqualizerData e = equalizer(f, g);
    EXPECT_EQ(verify_morphism(o, e.inclusion).verdict, Verdict::Yes);
    EXPECT_EQ(classify(o, e.inclusion).mono, Verdict::Yes);
    EXPECT_EQ(equivalent(o, compose(e.inclusion, f), compose(e.inclusion, g)), Verdict::Yes);
    EXPECT_EQ(subobject_leq(o, e.object, {X, F("(= (f x) (g x))", sig, X)}), Verdict::Yes);
    EXPECT_EQ(subobject_leq(o, {X, F("(= (f x) (g x))", sig, X)}, e.object), Verdict::Yes);
}

TEST(Syncat, UnionsAreLeastUpperBounds) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::Coherent};
    SynOracle o = semantic_oracle(T);
    std::vector<SynObject> subs = {{X, F("(P x)", sig, X)}, {X, F("(R x c)", sig, X)}};
    SynObject u = union_of(subs);
    for (auto& s : subs) EXPECT_EQ(subobject_leq(o, s, u), Verdict::Yes);
    std::vector<SynObject> uppers = {{X, F("(or (P x) (R x c) (R x x))", sig, X)}, {X, F("(or (P x) (R c c))", sig, X)}, {X, top()}};
    for (auto& z : uppers) {
        bool above = std::all_of(subs.begin(), subs.end(), [&](const SynObject& s) { return subobject_leq(o, s, z) == Verdict::Yes; });
        if (above) EXPECT_EQ(subobject_leq(o, u, z), Verdict::Yes);
    }
}

TEST(Syncat, UniversalImage) {
    Signature sig = functional();
    Theory T{sig, {}, Fragment::FirstOrder};
    SynOracle o = semantic_oracle(T, 2, KripkeBounds{2, 2, 1, 200000});
    SynObject eta{X, F("(P x)", sig, X)};
    SynMorphism id = identity_morphism({X, top()});
    SynObject a = forall_along(id, eta, Fragment::FirstOrder);
    SynObject back = rename_object(a, X);
    EXPECT_EQ(subobject_leq(o, back, eta), Verdict::Yes);
    EXPECT_EQ(subobject_leq(o, eta, back), Verdict::Yes);
    EXPECT_THROW(forall_along(id, eta, Fragment::Coherent), FragmentError);
    // pullback -| forall along f = graph of (f x), tested on sample subobjects of the target
    SynMorphism f = graph(sig, "(f x)");
    SynObject fa = forall_along(f, eta, Fragment::FirstOrder);
    for (std::string z : {"(P y)", "(R y y)", "false", "(P (f y))"}) {
        SynObject zeta{Y, F(z, sig, Y)};
        Verdict left = subobject_leq(o, pullback(f, zeta), eta);
        Verdict right = subobject_leq(o, zeta, fa);
        ASSERT_NE(left, Verdict::Unknown);
        EXPECT_EQ(left, right) << z;
    }
}

// with the semantic oracle over a propositional coherent theory, the subobject
// order on [(), true] is entailment in every two-valued model
TEST(Syncat, SubobjectOrderMatchesEntailment) {
    gen::Rng rng(21);
    Signature sig = gen::propositional(3);
    gen::FormulaOptions fo;
    fo.fragment = Fragment::Coherent;
    fo.depth = 2;
    for (int i = 0; i < 15; ++i) {
        Theory T = gen::random_theory(rng, sig, Fragment::Coherent, 3);
        SynOracle o = semantic_oracle(T, 1);
        std::vector<Formula> fs;
        for (int j = 0; j < 5; ++j) fs.push_back(gen::random_formula(rng, sig, {}, fo));
        for (auto& a : fs)
            for (auto& c : fs) {
                bool want = true;
                for (unsigned v = 0; v < 8; ++v) {
                    bool model = std::all_of(T.axioms.begin(), T.axioms.end(),
                                             [&](const Sequent& s) { return !truth(s.lhs, sig, v) || truth(s.rhs, sig, v); });
                    if (model && truth(a, sig, v) && !truth(c, sig, v)) want = false;
                }
                EXPECT_EQ(subobject_leq(o, {{}, a}, {{}, c}), from_bool(want));
            }
    }
}
